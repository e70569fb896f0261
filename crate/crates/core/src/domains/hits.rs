use nalgebra::DMatrix;

use super::body::ConvexBody;
use crate::error::{Error, Result};
use crate::lingeom::{ChartPoint, RankOneDirection};
use crate::scalar::Real;
use crate::tolerances::EPS_BOUNDARY;

/// Euclidean distance beyond which a ray still inside the body is declared
/// unbounded.
pub const RAY_HORIZON: f64 = 1e12;

/// Exit parameters of the line `X + t D`: the open interval `(t_minus, t_plus)`
/// is inside the body, the endpoints are not. Infinite values mean no exit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentHit<T: Real> {
    pub t_minus: T,
    pub t_plus: T,
}

impl<T: Real> SegmentHit<T> {
    pub fn is_bounded(&self) -> bool {
        self.t_minus.is_finite() && self.t_plus.is_finite()
    }

    pub fn is_full_line(&self) -> bool {
        !self.t_minus.is_finite() && !self.t_plus.is_finite()
    }
}

/// Exit parameters of `X + t S` for a rank-one direction of unit Frobenius norm.
pub fn boundary_hits<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, s: &RankOneDirection<T>) -> Result<SegmentHit<T>> {
    s.shape().check(&body.shape())?;
    line_hits(body, x, &s.matrix())
}

/// Exit parameters along an arbitrary nonzero direction `d`.
pub fn line_hits<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, d: &DMatrix<T>) -> Result<SegmentHit<T>> {
    x.shape().check(&body.shape())?;
    if !body.contains(x) {
        return Err(Error::PointOutside(body.label().to_string()));
    }
    let dn = d.norm();
    if dn == T::zero() || !dn.is_finite() {
        return Err(Error::InvalidInput("line direction must be nonzero and finite".into()));
    }
    let t_plus = exit_parameter(body, x.matrix(), d, dn);
    let t_minus = -exit_parameter(body, x.matrix(), &(-d), dn);
    Ok(SegmentHit { t_minus, t_plus })
}

/// `min(|t_minus|, |t_plus|)` along a unit rank-one direction.
pub fn delta_along<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, s: &RankOneDirection<T>) -> Result<T> {
    let h = boundary_hits(body, x, s)?;
    Ok(h.t_minus.abs().min(h.t_plus.abs()))
}

/// First `t > 0` with `x + t d` outside, to full floating-point resolution.
/// `x` must be inside.
pub(crate) fn exit_parameter<T: Real>(body: &ConvexBody<T>, x: &DMatrix<T>, d: &DMatrix<T>, dn: T) -> T {
    let inside = |t: T| body.contains_matrix(&(x + d * t));
    let horizon = T::lit(RAY_HORIZON) / dn;
    let mut lo = T::zero();
    let mut hi = match body.radius() {
        Some(r) => (r + x.norm()) / dn * T::lit(1.0 + 1e-12) + T::lit(1e-300),
        None => T::one() / dn,
    };
    while inside(hi) {
        lo = hi;
        hi *= T::lit(2.0);
        if hi > horizon {
            return T::infinity();
        }
    }
    bisect(lo, hi, inside)
}

/// Shrinks `[lo, hi]` (inside at `lo`, outside at `hi`) until the midpoint
/// rounds onto an endpoint; returns the outside endpoint.
pub(crate) fn bisect<T: Real>(mut lo: T, mut hi: T, inside: impl Fn(T) -> bool) -> T {
    loop {
        let mid = crate::scalar::midpoint(lo, hi);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Moves `e` onto the boundary along the segment from the interior reference
/// point. `e` must be outside the body or within `tol` (relative to the
/// segment length) of the boundary; the returned point is the first point
/// outside the body on that segment.
pub fn certify_boundary<T: Real>(body: &ConvexBody<T>, e: &ChartPoint<T>, tol: f64) -> Result<ChartPoint<T>> {
    e.shape().check(&body.shape())?;
    let c = body.interior();
    let d = e.matrix() - c.matrix();
    let dn = d.norm();
    let not_boundary = |reason: String| Error::NotBoundary { body: body.label().to_string(), reason };
    if dn == T::zero() {
        return Err(not_boundary("point equals the interior reference point".into()));
    }
    let t = exit_parameter(body, c.matrix(), &d, dn);
    if !t.is_finite() {
        return Err(not_boundary("ray through the point never leaves the body".into()));
    }
    let gap = (t - T::one()).abs().to_f64_lossy();
    if gap > tol.max(EPS_BOUNDARY) {
        let reason = if t > T::one() { "point is inside" } else { "point is outside the closure" };
        return Err(not_boundary(format!("{reason} (relative gap {gap:.3e})")));
    }
    Ok(ChartPoint::from_parts(body.shape(), c.matrix() + d * t))
}

/// Whether `x` is on the boundary: outside, but a step of `eps` toward the
/// interior reference point is inside.
pub fn on_boundary<T: Real>(body: &ConvexBody<T>, x: &DMatrix<T>, eps: f64) -> bool {
    if body.contains_matrix(x) {
        return false;
    }
    let to_c = body.interior().matrix() - x;
    let n = to_c.norm();
    n > T::zero() && body.contains_matrix(&(x + to_c * (T::lit(eps) / n)))
}
