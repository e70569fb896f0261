//! Experiment drivers for the limit theorems: convergence of rescaled bodies
//! to tangent cones, metric convergence of nested bodies, the extreme-point
//! characterizations and the failure of the tangent-cone criterion off the
//! square case. These run in `f64`.

mod convergence;
mod faces;
mod pnotq;
mod suite;

pub use convergence::{
    default_probe_pairs, nested_body_metric_convergence, tangent_cone_convergence, trend_verdict, ConvergenceBudget, ConvergenceReport, ProbePair, TrendVerdict,
};
pub use faces::{face_relation_probe, FaceRelationVerdict};
pub use pnotq::pnotq_failure_demo;
pub use suite::{extreme_equivalence_suite, AdjacencyResult, ExtremeSuiteBudget, ExtremeSuiteRow, LimitResult, TangentConeResult, ZResult};
