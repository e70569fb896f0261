use grhilbert::Error;

/// Outcome classes with fixed exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Point or domain error (exit 2).
    Domain(String),
    /// Configuration error (exit 3).
    Config(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 2,
            Failure::Config(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Config(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Descriptor(_) | Error::InvalidInput(_) | Error::ShapeMismatch { .. } | Error::NotOrthogonal { .. } => Failure::Config(msg),
            _ => Failure::Domain(msg),
        }
    }
}

pub fn config_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}
