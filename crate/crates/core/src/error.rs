use thiserror::Error;

/// Errors raised by the geometry, metric and experiment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("image left the affine chart (condition number {condition:.3e})")]
    ChartEscape { condition: f64 },

    #[error("degenerate cross-ratio configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("matrix is singular")]
    Singular,

    #[error("dominant eigenvalue cluster is defective (algebraic {algebraic}, geometric {geometric})")]
    NonDiagonalizableBeyondTolerance { algebraic: usize, geometric: usize },

    #[error("matrix is not orthogonal (defect {defect:.3e})")]
    NotOrthogonal { defect: f64 },

    #[error("point lies outside the domain `{0}`")]
    PointOutside(String),

    #[error("point is not on the boundary of `{body}` ({reason})")]
    NotBoundary { body: String, reason: String },

    #[error("body `{0}` misses the clipping ball")]
    EmptyClip(String),

    #[error("closed ball of radius {radius} is not contained in the domain")]
    BallNotContained { radius: f64 },

    #[error("probe point outside `{0}`")]
    ProbeOutside(String),

    #[error("no rank-one line witness found within budget")]
    WitnessNotFound,

    #[error("degenerate limit did not converge: rank estimate {rank}")]
    ConvergenceNotReached { rank: usize },

    #[error("descriptor error: {0}")]
    Descriptor(String),
}

pub type Result<T> = std::result::Result<T, Error>;
