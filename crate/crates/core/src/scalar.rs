//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All geometry is written against [`Real`], which is satisfied by `f32` and
//! `f64`. Tolerances are stored as `f64` and converted on use, so an `f32`
//! instantiation works but only at the precision `f32` can deliver.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar usable by the geometry kernels.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal or tolerance.
    #[inline]
    fn lit(x: f64) -> Self {
        // FromPrimitive::from_f64 never fails for float targets.
        <Self as FromPrimitive>::from_f64(x).unwrap()
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn infinity() -> Self {
        Self::lit(f64::INFINITY)
    }

    #[inline]
    fn neg_infinity() -> Self {
        Self::lit(f64::NEG_INFINITY)
    }

    #[inline]
    fn usize(n: usize) -> Self {
        Self::lit(n as f64)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Midpoint of `lo` and `hi` that never overflows and is exactly representable
/// between them whenever such a value exists.
#[inline]
pub(crate) fn midpoint<T: Real>(lo: T, hi: T) -> T {
    lo + (hi - lo) * T::lit(0.5)
}
