//! The generalized Hilbert metric: the single-segment distance `rho`, rank-one
//! chains, the upper-bound estimator for `K`, and the lower bounds used to
//! bracket it.

mod chain;
mod estimate;
mod rho;

pub use chain::{feasible_svd_chain, svd_chain, Chain};
pub use estimate::{k_estimate, k_estimate_seeded, MetricBudget, MetricEstimate};
pub use rho::{hilbert_classical, hilbert_lower_bound, rho, rho_lower_bound_ball, BallBound, RhoValue};
