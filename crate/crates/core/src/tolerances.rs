//! Numerical thresholds used throughout the crate.
//!
//! The constants are the defaults; [`Tolerances`] bundles the ones that the
//! searches and certifications take at run time so they can be scaled together.

use serde::{Deserialize, Serialize};

/// Relative singular-value cutoff for numerical rank.
pub const TAU_RANK: f64 = 1e-9;
/// Relative clustering threshold for eigenvalue moduli.
pub const TAU_EIG: f64 = 1e-7;
/// Reciprocal condition number below which a chart denominator counts as singular.
pub const EPS_SINGULAR: f64 = 1e-12;
/// Boundary-hit accuracy, relative to `max(1, |t|)`.
pub const EPS_BOUNDARY: f64 = 1e-10;
/// Ray length beyond which a boundary hit is reported as infinite.
pub const T_BIG: f64 = 1e3;
/// Smallest scale tried by the tangent-cone membership scan.
pub const TANGENT_SCALE_FLOOR: f64 = 9.094_947_017_729_282e-13; // 2^-40
/// Inward perturbation used to certify that a point lies on the boundary.
pub const EPS_MEMBER: f64 = 1e-8;
/// Determinant level accepted as a zero of `det(X - e)`.
pub const TAU_DET: f64 = 1e-8;

/// Runtime tolerance bundle. `scaled` multiplies every entry by one factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub rank: f64,
    pub eig: f64,
    pub boundary: f64,
    pub member: f64,
    pub det: f64,
    pub t_big: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank: TAU_RANK, eig: TAU_EIG, boundary: EPS_BOUNDARY, member: EPS_MEMBER, det: TAU_DET, t_big: T_BIG }
    }
}

impl Tolerances {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            rank: self.rank * factor,
            eig: self.eig * factor,
            boundary: self.boundary * factor,
            member: self.member * factor,
            det: self.det * factor,
            t_big: self.t_big,
        }
    }
}
