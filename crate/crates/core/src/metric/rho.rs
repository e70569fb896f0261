use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domains::sample::{random_rank_one, random_unit_matrix};
use crate::domains::{delta_along, line_hits, ConvexBody, SegmentHit};
use crate::error::{Error, Result};
use crate::lingeom::cross_ratio;
use crate::lingeom::linalg::numerical_rank;
use crate::lingeom::ChartPoint;
use crate::scalar::Real;
use crate::tolerances::TAU_RANK;

/// Single-segment distance with the boundary hits it was computed from.
///
/// `endpoints` is parameterized so that `X` sits at `t = 0` and `Y` at
/// `t = 1`; it is `(-inf, inf)` when `X = Y` or `rank(Y - X) > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoValue<T: Real> {
    pub value: T,
    pub endpoints: SegmentHit<T>,
    /// The rank-one line through `X` and `Y` lies entirely in the body.
    pub full_line: bool,
}

fn check_inside<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>) -> Result<()> {
    x.shape().check(&body.shape())?;
    if body.contains(x) {
        Ok(())
    } else {
        Err(Error::PointOutside(body.label().to_string()))
    }
}

fn unbounded<T: Real>() -> SegmentHit<T> {
    SegmentHit { t_minus: T::neg_infinity(), t_plus: T::infinity() }
}

/// `|log [a; 0; 1; b]|` from the hits of the line `x + t d`.
fn log_cross_ratio<T: Real>(hit: &SegmentHit<T>) -> Result<T> {
    if hit.is_full_line() {
        return Ok(T::zero());
    }
    Ok(cross_ratio(hit.t_minus, T::zero(), T::one(), hit.t_plus)?.ln().abs())
}

/// `rho_Omega(X, Y)`: `+inf` unless `Y - X` has rank at most one, otherwise
/// the absolute log cross ratio against the boundary hits of the line.
pub fn rho<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, y: &ChartPoint<T>) -> Result<RhoValue<T>> {
    check_inside(body, x)?;
    check_inside(body, y)?;
    let d = y.matrix() - x.matrix();
    if d.norm() == T::zero() {
        return Ok(RhoValue { value: T::zero(), endpoints: unbounded(), full_line: false });
    }
    if numerical_rank(&d, TAU_RANK) > 1 {
        return Ok(RhoValue { value: T::infinity(), endpoints: unbounded(), full_line: false });
    }
    let hit = line_hits(body, x, &d)?;
    Ok(RhoValue { value: log_cross_ratio(&hit)?, endpoints: hit, full_line: hit.is_full_line() })
}

/// `rho` along `x + t d` for a known inside point `x` and rank-one `d`;
/// `+inf` when `x + d` is not strictly inside the hit interval.
pub(crate) fn rho_segment<T: Real>(body: &ConvexBody<T>, x: &DMatrix<T>, d: &DMatrix<T>) -> T {
    let dn = d.norm();
    if dn == T::zero() {
        return T::zero();
    }
    let t_plus = crate::domains::exit_parameter(body, x, d, dn);
    let t_minus = -crate::domains::exit_parameter(body, x, &(-d), dn);
    let hit = SegmentHit { t_minus, t_plus };
    log_cross_ratio(&hit).unwrap_or_else(|_| T::infinity())
}

/// Hilbert metric of the body as a convex set in `R^{pq}`, ignoring the
/// rank-one restriction. A lower bound for `K`.
pub fn hilbert_lower_bound<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, y: &ChartPoint<T>) -> Result<T> {
    check_inside(body, x)?;
    check_inside(body, y)?;
    let d = y.matrix() - x.matrix();
    if d.norm() == T::zero() {
        return Ok(T::zero());
    }
    log_cross_ratio(&line_hits(body, x, &d)?)
}

/// Classical Hilbert metric for `p = 1`, where every direction is rank one.
pub fn hilbert_classical<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, y: &ChartPoint<T>) -> Result<T> {
    if body.shape().p != 1 {
        return Err(Error::InvalidInput("hilbert_classical needs p = 1".into()));
    }
    hilbert_lower_bound(body, x, y)
}

/// Output of [`rho_lower_bound_ball`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallBound<T: Real> {
    /// `1 / (eps + M)`.
    pub factor: T,
    /// Largest sampled `delta_along` over the ball.
    pub m_estimate: T,
    pub samples: usize,
}

/// Linear lower bound `rho(z1, z2) >= factor * |z1 - z2|` for rank-one pairs
/// in the closed `eps`-ball about `x`, with `M` estimated by sampling
/// `delta_along` over the ball.
pub fn rho_lower_bound_ball<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, eps: T, samples: usize, seed: u64) -> Result<BallBound<T>> {
    check_inside(body, x)?;
    if eps.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidInput("ball radius must be positive".into()));
    }
    let shape = body.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let not_contained = || Error::BallNotContained { radius: eps.to_f64_lossy() };
    // Containment: every sampled direction must reach past eps.
    let mut dirs: Vec<DMatrix<T>> = Vec::new();
    for i in 0..shape.q {
        for j in 0..shape.p {
            let mut e = DMatrix::zeros(shape.q, shape.p);
            e[(i, j)] = T::one();
            dirs.push(e);
        }
    }
    for _ in 0..samples {
        dirs.push(random_unit_matrix(shape, &mut rng));
    }
    for d in &dirs {
        let h = line_hits(body, x, d)?;
        if h.t_minus.abs().min(h.t_plus) <= eps {
            return Err(not_contained());
        }
    }
    let mut m = T::zero();
    for k in 0..samples.max(1) {
        let z = if k == 0 {
            x.clone()
        } else {
            let u = random_unit_matrix::<T, _>(shape, &mut rng);
            let r = eps * T::lit(rand::Rng::random_range(&mut rng, 0.0..1.0));
            x.offset(&u, r)
        };
        let s = random_rank_one(shape, &mut rng);
        m = m.max(delta_along(body, &z, &s).map_err(|_| not_contained())?);
    }
    Ok(BallBound { factor: T::one() / (eps + m), m_estimate: m, samples: samples.max(1) })
}
