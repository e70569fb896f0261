//! Projective and linear geometry of the affine chart `M_{q,p}(R)` of
//! `Gr_p(R^{p+q})`: chart points, fractional-linear actions, cross ratios,
//! rank-one lines, the Plücker embedding and compound matrices.

mod chart;
mod cross_ratio;
pub mod linalg;
mod plucker;
pub mod serial;
mod spectrum;
mod transform;

pub use chart::{intersection_dim, operator_norm, rank_one_line, ChartPoint, ChartShape, RankOneDirection, RankOneLine};
pub use cross_ratio::cross_ratio;
pub use plucker::{compound, compound_matrix, plucker_embed, CompoundTransform, PluckerVector};
pub use spectrum::{dominant_spectrum, dominant_spectrum_with, DominantSpectrum};
pub use transform::ProjectiveTransform;
