//! Boundary adjacency, the hypersurfaces `Z_xi` and the determinant test for
//! extreme points.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::body::ConvexBody;
use super::hits::{certify_boundary, on_boundary};
use super::rproper::{gauge_normal, singular_products};
use super::sample::{hit_and_run, random_rank_one};
use crate::error::{Error, Result};
use crate::lingeom::linalg::{numerical_rank, singular_values};
use crate::lingeom::{ChartPoint, RankOneDirection};
use crate::scalar::Real;
use crate::tolerances::{EPS_BOUNDARY, EPS_MEMBER, TAU_DET, TAU_RANK};

/// Relative overshoot past both endpoints used by [`boundary_adjacent`].
const ADJACENCY_OVERSHOOT: f64 = 1e-3;
const ADJACENCY_SAMPLES: usize = 16;

/// Whether the `p`-plane of `x` meets the `q`-plane `xi` (columns of a
/// `(p+q) x q` matrix) nontrivially.
pub fn z_hypersurface_contains_plane<T: Real>(xi: &DMatrix<T>, x: &ChartPoint<T>) -> Result<bool> {
    let shape = x.shape();
    if xi.shape() != (shape.ambient(), shape.q) {
        return Err(Error::ShapeMismatch { expected: format!("{}x{}", shape.ambient(), shape.q), found: format!("{}x{}", xi.nrows(), xi.ncols()) });
    }
    let s = x.stacked();
    let mut joint = DMatrix::zeros(shape.ambient(), shape.ambient());
    joint.view_mut((0, 0), (shape.ambient(), shape.p)).copy_from(&s);
    joint.view_mut((0, shape.p), (shape.ambient(), shape.q)).copy_from(xi);
    Ok(numerical_rank(&joint, TAU_RANK) < shape.ambient())
}

/// Square charts: whether `det(X - Xi) = 0`, judged by the smallest singular
/// value of `X - Xi` relative to `max(1, largest)`.
pub fn z_hypersurface_contains<T: Real>(xi: &ChartPoint<T>, x: &ChartPoint<T>) -> Result<bool> {
    xi.shape().check(&x.shape())?;
    if !x.shape().is_square() {
        return Err(Error::InvalidInput("chart-point form of Z_xi needs p = q".into()));
    }
    let sv = singular_values(&(x.matrix() - xi.matrix()));
    let top = sv[0].max(T::one());
    Ok(*sv.last().unwrap() <= top * T::lit(TAU_RANK))
}

/// Whether `x` and `y` lie in one open boundary segment along a rank-one
/// line: `rank(y - x) <= 1`, and sampled points of the segment, extended
/// slightly past both ends, are on the boundary.
pub fn boundary_adjacent<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, y: &ChartPoint<T>) -> bool {
    let d = y.matrix() - x.matrix();
    if d.norm() <= T::lit(1e-14) * x.norm().max(T::one()) {
        return true;
    }
    if numerical_rank(&d, TAU_RANK) > 1 {
        return false;
    }
    let eta = ADJACENCY_OVERSHOOT;
    let n = ADJACENCY_SAMPLES;
    let mut lambdas = vec![-eta, 0.0, 1.0, 1.0 + eta];
    lambdas.extend((1..=n).map(|k| k as f64 / (n + 1) as f64));
    lambdas.into_iter().all(|l| on_boundary(body, &(x.matrix() + &d * T::lit(l)), EPS_MEMBER))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtremeBudget {
    /// Hit-and-run samples of the body.
    pub samples: usize,
    /// Random rank-one directions tried by the adjacency search.
    pub directions: usize,
    pub bisection_steps: usize,
}

impl Default for ExtremeBudget {
    fn default() -> Self {
        Self { samples: 300, directions: 100, bisection_steps: 200 }
    }
}

impl ExtremeBudget {
    pub fn scaled(self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        Self { samples: s(self.samples), directions: s(self.directions), bisection_steps: self.bisection_steps }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExtremeVerdict<T: Real> {
    /// No zero of `det(X - e)` was found; `min_abs_det` is the smallest value seen.
    ExtremeEvidence { min_abs_det: T, samples: usize },
    /// A point of the body on `Z_e`.
    NonExtremeWitness { point: ChartPoint<T>, det: T },
}

impl<T: Real> ExtremeVerdict<T> {
    pub fn is_extreme(&self) -> bool {
        matches!(self, Self::ExtremeEvidence { .. })
    }
}

/// Looks for a point of the body on `Z_e = { det(X - e) = 0 }`.
///
/// `det(X - e)` is evaluated on hit-and-run samples and on points pulled
/// toward `e`. Two samples of opposite sign bound a segment inside the body
/// on which the determinant vanishes; bisection on that segment yields the
/// witness. Without a sign change the verdict is `ExtremeEvidence`.
pub fn extreme_point_test<T: Real>(body: &ConvexBody<T>, e: &ChartPoint<T>, budget: &ExtremeBudget, seed: u64) -> Result<ExtremeVerdict<T>> {
    if !body.shape().is_square() {
        return Err(Error::InvalidInput("extreme_point_test needs p = q".into()));
    }
    let e = certify_boundary(body, e, EPS_BOUNDARY)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = body.interior().clone();
    let cap = T::lit(2.0) * (T::one() + c.norm() + e.norm());
    let walk = hit_and_run(body, &c, budget.samples, cap, &mut rng);
    let mut samples = vec![c.matrix().clone()];
    for y in &walk {
        samples.push(y.matrix().clone());
        for s in [0.5, 0.2, 0.1, 0.05, 0.02, 0.01] {
            samples.push(e.matrix() + (y.matrix() - e.matrix()) * T::lit(s));
        }
    }
    let f = |x: &DMatrix<T>| (x - e.matrix()).determinant();
    let mut pos: Option<DMatrix<T>> = None;
    let mut neg: Option<DMatrix<T>> = None;
    let mut min_abs = T::infinity();
    for x in &samples {
        if !body.contains_matrix(x) {
            continue;
        }
        let v = f(x);
        min_abs = min_abs.min(v.abs());
        if v == T::zero() {
            return Ok(ExtremeVerdict::NonExtremeWitness { point: ChartPoint::from_parts(e.shape(), x.clone()), det: v });
        }
        if v > T::zero() && pos.is_none() {
            pos = Some(x.clone());
        } else if v < T::zero() && neg.is_none() {
            neg = Some(x.clone());
        }
        if let (Some(a), Some(b)) = (&pos, &neg) {
            let (mut lo, mut hi) = (a.clone(), b.clone());
            let mut best = lo.clone();
            for _ in 0..budget.bisection_steps {
                let mid = (&lo + &hi) * T::lit(0.5);
                let v = f(&mid);
                best = mid.clone();
                if v.abs() < T::lit(TAU_DET) {
                    break;
                }
                if v > T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let det = f(&best);
            if det.abs() < T::lit(TAU_DET) && body.contains_matrix(&best) {
                return Ok(ExtremeVerdict::NonExtremeWitness { point: ChartPoint::from_parts(e.shape(), best), det });
            }
        }
    }
    Ok(ExtremeVerdict::ExtremeEvidence { min_abs_det: min_abs, samples: samples.len() })
}

/// A boundary point `y != e` adjacent to `e`, from rank-one perturbations
/// `e + h S`. Candidate directions come from singular vectors of `e`, of
/// `e - c`, of the estimated normal at `e`, coordinate directions, and random
/// rank-one directions.
pub fn adjacent_partner<T: Real>(body: &ConvexBody<T>, e: &ChartPoint<T>, budget: &ExtremeBudget, seed: u64) -> Result<Option<ChartPoint<T>>> {
    let e = certify_boundary(body, e, EPS_BOUNDARY)?;
    let shape = e.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = body.interior().matrix();
    let mut cands: Vec<RankOneDirection<T>> = Vec::new();
    cands.extend(singular_products(e.matrix()));
    cands.extend(singular_products(&(e.matrix() - c)));
    if let Some(n) = gauge_normal(body, c, e.matrix()) {
        cands.extend(singular_products(&n));
    }
    for i in 0..shape.q {
        for j in 0..shape.p {
            cands.push(RankOneDirection::elementary(shape, i, j)?);
        }
    }
    for _ in 0..budget.directions {
        cands.push(random_rank_one(shape, &mut rng));
    }
    for s in &cands {
        let m = s.matrix();
        for h in [1e-1, 1e-2, 1e-3] {
            for sign in [1.0, -1.0] {
                let y = ChartPoint::from_parts(shape, e.matrix() + &m * T::lit(sign * h));
                if boundary_adjacent(body, &e, &y) {
                    return Ok(Some(y));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> ChartPoint<f64> {
        ChartPoint::from_rows(2, 2, v).unwrap()
    }

    #[test]
    fn z_test_examples() {
        let xi = pt(&[0.3, 0.1, -0.2, 0.5]);
        assert!(z_hypersurface_contains(&xi, &xi).unwrap());
        // det(X - E) = 0.5
        let e = pt(&[1.0, 0.0, 0.0, 1.0]);
        let x = pt(&[1.5, 0.0, 0.0, 2.0]);
        assert!(!z_hypersurface_contains(&e, &x).unwrap());
        // Plane form agrees: xi = [I; E] spans a q-plane when p = q.
        assert!(!z_hypersurface_contains_plane(&e.stacked(), &x).unwrap());
        assert!(z_hypersurface_contains_plane(&xi.stacked(), &xi).unwrap());
    }

    #[test]
    fn adjacency_examples() {
        let b = ConvexBody::<f64>::operator_ball(2, 2).unwrap();
        let x = pt(&[1.0, 0.0, 0.0, 0.2]);
        assert!(boundary_adjacent(&b, &x, &x));
        assert!(boundary_adjacent(&b, &x, &pt(&[1.0, 0.0, 0.0, 0.6])));
        assert!(!boundary_adjacent(&b, &pt(&[1.0, 0.0, 0.0, 1.0]), &pt(&[-1.0, 0.0, 0.0, -1.0])));
        // I is an endpoint of the boundary segment toward I - 0.1 e1 e1^T, not inside it.
        assert!(!boundary_adjacent(&b, &pt(&[1.0, 0.0, 0.0, 1.0]), &pt(&[0.9, 0.0, 0.0, 1.0])));
    }

    #[test]
    fn determinant_test_on_ball() {
        let b = ConvexBody::<f64>::operator_ball(2, 2).unwrap();
        let budget = ExtremeBudget::default();
        assert!(extreme_point_test(&b, &pt(&[1.0, 0.0, 0.0, 1.0]), &budget, 1).unwrap().is_extreme());
        match extreme_point_test(&b, &pt(&[1.0, 0.0, 0.0, 0.3]), &budget, 1).unwrap() {
            ExtremeVerdict::NonExtremeWitness { point, det } => {
                assert!(b.contains(&point));
                assert!(det.abs() < 1e-8);
            }
            v => panic!("{v:?}"),
        }
        let i1 = ConvexBody::<f64>::operator_ball(1, 1).unwrap();
        let one = ChartPoint::from_rows(1, 1, &[1.0]).unwrap();
        assert!(extreme_point_test(&i1, &one, &budget, 1).unwrap().is_extreme());
    }

    #[test]
    fn partner_search() {
        let b = ConvexBody::<f64>::operator_ball(2, 2).unwrap();
        let budget = ExtremeBudget::default();
        assert!(adjacent_partner(&b, &pt(&[1.0, 0.0, 0.0, 0.0]), &budget, 3).unwrap().is_some());
        assert!(adjacent_partner(&b, &pt(&[1.0, 0.0, 0.0, 1.0]), &budget, 3).unwrap().is_none());
    }
}
