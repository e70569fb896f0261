use grhilbert::domains::{DomainDescriptor, RProperStatus, Rows, SearchBudget};
use grhilbert::metric::MetricBudget;
use grhilbert::rescaling::{ConvergenceBudget, ExtremeSuiteBudget};
use grhilbert::Tolerances;
use serde::{Deserialize, Serialize};

/// Contents of the `--config` file. Every section is optional; unknown
/// fields are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub domain: Option<DomainDescriptor>,
    pub seed: Option<u64>,
    pub x: Option<Rows>,
    pub y: Option<Rows>,
    pub budget: BudgetConfig,
    pub tolerances: Tolerances,
    pub suite: SuiteConfig,
    pub slice: Option<SliceSpec>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub metric: MetricBudget,
    pub search: SearchBudget,
    pub extreme: ExtremeSuiteBudget,
    pub convergence: ConvergenceBudget,
}

impl BudgetConfig {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            metric: self.metric.scaled(factor),
            search: self.search.scaled(factor),
            extreme: self.extreme.scaled(factor),
            convergence: self.convergence.scaled(factor),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    /// Boundary points for the extreme suite.
    pub points: Option<Vec<Rows>>,
    /// Boundary point for the convergence suite (default: identity).
    pub point: Option<Rows>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub t_grid: Option<Vec<f64>>,
    /// Dilation factors; when present the convergence suite compares nested bodies.
    pub lambdas: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub probes: Option<usize>,
    pub elements: Option<usize>,
    pub samples: Option<usize>,
    pub pairs: Option<usize>,
    pub expect: Option<RProperStatus>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    pub center: Rows,
    pub u: Rows,
    /// Omitted for a one-dimensional slice (`n_v = 1`).
    #[serde(default)]
    pub v: Option<Rows>,
    pub n_u: usize,
    #[serde(default = "one")]
    pub n_v: usize,
    /// Grid coordinates run over `[-extent, extent]`.
    pub extent: f64,
    #[serde(default)]
    pub levels: Vec<f64>,
}

fn one() -> usize {
    1
}
