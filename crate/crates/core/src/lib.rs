//! Generalized Hilbert metric for convex domains in real Grassmannians.
//!
//! Points of `Gr_p(R^{p+q})` are handled in the affine chart of `q x p`
//! matrices. A domain is an oracle-defined open convex subset of that chart.
//! The single-segment distance `rho` is the logarithm of a cross ratio along
//! a rank-one line; the metric `K` is the infimum of `rho` sums over chains of
//! rank-one segments and is estimated from above by [`metric::k_estimate`],
//! with the ambient Hilbert metric as an independent lower bound.
//!
//! The numerical kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod domains;
pub mod error;
pub mod lingeom;
pub mod metric;
pub mod rescaling;
pub mod scalar;
pub mod symmetry;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::Real;
pub use tolerances::Tolerances;

pub type ChartPoint = lingeom::ChartPoint<f64>;
pub type ProjectiveTransform = lingeom::ProjectiveTransform<f64>;
pub type RankOneDirection = lingeom::RankOneDirection<f64>;
pub type PluckerVector = lingeom::PluckerVector<f64>;
pub type CompoundTransform = lingeom::CompoundTransform<f64>;
pub type DominantSpectrum = lingeom::DominantSpectrum<f64>;
pub type ConvexBody = domains::ConvexBody<f64>;
pub type SegmentHit = domains::SegmentHit<f64>;
pub type Chain = metric::Chain<f64>;
pub type MetricEstimate = metric::MetricEstimate<f64>;
pub type RhoValue = metric::RhoValue<f64>;
pub type OneParameterGroup = symmetry::OneParameterGroup<f64>;

pub use lingeom::ChartShape;
pub type DegenerateLimit = symmetry::DegenerateLimit<f64>;
