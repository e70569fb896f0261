use nalgebra::DMatrix;

use super::rho::rho_segment;
use crate::domains::ConvexBody;
use crate::error::{Error, Result};
use crate::lingeom::{ChartPoint, RankOneDirection};
use crate::scalar::Real;
use crate::tolerances::TAU_RANK;

/// Waypoints `X_0, ..., X_m` with rank-one steps `X_{i+1} = X_i + t_i S_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain<T: Real> {
    waypoints: Vec<ChartPoint<T>>,
    directions: Vec<RankOneDirection<T>>,
    steps: Vec<T>,
}

impl<T: Real> Chain<T> {
    /// Builds the chain through the given waypoints; every consecutive
    /// difference must have numerical rank at most one.
    pub fn from_waypoints(waypoints: Vec<ChartPoint<T>>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::InvalidInput("a chain needs at least one waypoint".into()));
        }
        let shape = waypoints[0].shape();
        let mut directions = Vec::new();
        let mut steps = Vec::new();
        for w in waypoints.windows(2) {
            shape.check(&w[1].shape())?;
            let d = w[1].matrix() - w[0].matrix();
            if !is_rank_one_step(&d, w[0].matrix(), w[1].matrix()) {
                return Err(Error::InvalidInput("chain step is not rank one".into()));
            }
            let n = d.norm();
            if n == T::zero() {
                return Err(Error::InvalidInput("repeated chain waypoint".into()));
            }
            directions.push(RankOneDirection::from_matrix(&d)?);
            steps.push(n);
        }
        // from_matrix fixes the sign of S; make t_i carry the orientation.
        for (i, s) in directions.iter().enumerate() {
            let d = waypoints[i + 1].matrix() - waypoints[i].matrix();
            if s.matrix().dot(&d) < T::zero() {
                steps[i] = -steps[i];
            }
        }
        Ok(Self { waypoints, directions, steps })
    }

    pub fn waypoints(&self) -> &[ChartPoint<T>] {
        &self.waypoints
    }

    pub fn directions(&self) -> &[RankOneDirection<T>] {
        &self.directions
    }

    pub fn steps(&self) -> &[T] {
        &self.steps
    }

    /// Number of segments.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `max_i |X_i + t_i S_i - X_{i+1}|`.
    pub fn reconstruction_error(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.len() {
            let r = self.waypoints[i].matrix() + self.directions[i].matrix() * self.steps[i] - self.waypoints[i + 1].matrix();
            worst = worst.max(r.norm());
        }
        worst
    }

    /// Per-segment `rho` values (`+inf` for a waypoint outside the body).
    pub fn segment_rhos(&self, body: &ConvexBody<T>) -> Vec<T> {
        self.waypoints
            .windows(2)
            .map(|w| {
                if !body.contains(&w[0]) || !body.contains(&w[1]) {
                    return T::infinity();
                }
                rho_segment(body, w[0].matrix(), &(w[1].matrix() - w[0].matrix()))
            })
            .collect()
    }

    pub fn value(&self, body: &ConvexBody<T>) -> T {
        self.segment_rhos(body).into_iter().fold(T::zero(), |a, b| a + b)
    }

    pub fn is_feasible(&self, body: &ConvexBody<T>) -> bool {
        self.waypoints.iter().all(|w| body.contains(w))
    }

    /// Concatenation; the last waypoint of `self` must equal the first of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let (a, b) = (self.waypoints.last().unwrap(), &other.waypoints[0]);
        if a.matrix() != b.matrix() {
            return Err(Error::InvalidInput("chains do not meet".into()));
        }
        let mut w = self.waypoints.clone();
        w.extend(other.waypoints[1..].iter().cloned());
        Self::from_waypoints(w)
    }
}

/// Rank at most one up to the relative cutoff, allowing for the rounding
/// left when a small step is recovered as a difference of larger waypoints.
fn is_rank_one_step<T: Real>(d: &DMatrix<T>, a: &DMatrix<T>, b: &DMatrix<T>) -> bool {
    let sv = crate::lingeom::linalg::singular_values(d);
    let slack = T::lit(64.0) * T::default_epsilon() * (a.norm() + b.norm());
    sv.len() < 2 || sv[1] <= sv[0] * T::lit(TAU_RANK) + slack
}

/// Terms `sigma_i u_i v_i^T` of `Y - X`, by decreasing singular value with
/// ties kept in SVD order; terms below the rank threshold are dropped.
pub(crate) fn svd_terms<T: Real>(d: &DMatrix<T>) -> Vec<DMatrix<T>> {
    if d.norm() == T::zero() {
        return Vec::new();
    }
    let svd = crate::lingeom::linalg::svd(d);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let top = sv[order[0]];
    order.into_iter().filter(|&k| sv[k] > top * T::lit(TAU_RANK)).map(|k| u.column(k) * vt.row(k) * sv[k]).collect()
}

fn chain_through_terms<T: Real>(x: &ChartPoint<T>, y: &ChartPoint<T>, terms: &[DMatrix<T>]) -> Vec<ChartPoint<T>> {
    let mut w = vec![x.clone()];
    let mut acc = x.matrix().clone();
    for (k, t) in terms.iter().enumerate() {
        if k + 1 == terms.len() {
            w.push(y.clone());
        } else {
            acc += t;
            w.push(ChartPoint::from_parts(x.shape(), acc.clone()));
        }
    }
    w
}

/// Chain from `X` to `Y` through the partial sums of the singular value
/// decomposition of `Y - X`, larger singular values first.
pub fn svd_chain<T: Real>(x: &ChartPoint<T>, y: &ChartPoint<T>) -> Result<Chain<T>> {
    x.shape().check(&y.shape())?;
    let terms = svd_terms(&(y.matrix() - x.matrix()));
    Chain::from_waypoints(chain_through_terms(x, y, &terms))
}

/// Chain with the given term order.
pub(crate) fn ordered_chain<T: Real>(x: &ChartPoint<T>, y: &ChartPoint<T>, terms: &[DMatrix<T>]) -> Result<Chain<T>> {
    Chain::from_waypoints(chain_through_terms(x, y, terms))
}

/// The SVD chain when all its waypoints are in the body; otherwise a
/// staircase: the segment `[X, Y]` is cut into `n = 2, 4, 8, ...` pieces and
/// each piece is crossed by the SVD terms of `(Y - X) / n`, which keeps every
/// waypoint within `|Y - X| / n` of the segment.
pub fn feasible_svd_chain<T: Real>(body: &ConvexBody<T>, x: &ChartPoint<T>, y: &ChartPoint<T>) -> Result<Chain<T>> {
    let chain = svd_chain(x, y)?;
    if chain.is_feasible(body) {
        return Ok(chain);
    }
    let d = y.matrix() - x.matrix();
    let terms = svd_terms(&d);
    // Partial sums of the terms; waypoints are formed directly from them so
    // rounding does not accumulate along long staircases.
    let partial: Vec<DMatrix<T>> = terms
        .iter()
        .scan(DMatrix::zeros(d.nrows(), d.ncols()), |acc, t| {
            *acc += t;
            Some(acc.clone())
        })
        .collect();
    for level in 1..=16 {
        let n = 1usize << level;
        let scale = T::one() / T::usize(n);
        let mut w = vec![x.clone()];
        for k in 0..n {
            let base = x.matrix() + &d * (T::usize(k) * scale);
            for (j, p) in partial.iter().enumerate() {
                if k + 1 == n && j + 1 == partial.len() {
                    w.push(y.clone());
                } else {
                    w.push(ChartPoint::from_parts(x.shape(), &base + p * scale));
                }
            }
        }
        let c = Chain::from_waypoints(w)?;
        if c.is_feasible(body) {
            return Ok(c);
        }
    }
    Err(Error::PointOutside(format!("{} (no feasible staircase chain)", body.label())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> ChartPoint<f64> {
        ChartPoint::from_rows(2, 2, v).unwrap()
    }

    #[test]
    fn rank_one_difference_is_one_segment() {
        let c = svd_chain(&pt(&[0.0; 4]), &pt(&[0.2, 0.4, 0.1, 0.2])).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn larger_singular_value_first() {
        let c = svd_chain(&pt(&[0.0; 4]), &pt(&[0.3, 0.0, 0.0, 0.4])).unwrap();
        assert_eq!(c.len(), 2);
        assert!((c.waypoints()[1].matrix() - pt(&[0.0, 0.0, 0.0, 0.4]).matrix()).norm() < 1e-15);
        assert!(c.reconstruction_error() < 1e-12);
    }

    #[test]
    fn staircase_when_svd_chain_leaves() {
        // The first SVD step turns the symmetric part indefinite.
        let cone = ConvexBody::<f64>::half_cone(2).unwrap();
        let x = pt(&[1.0, 3.0, -3.0, 1.0]);
        let y = pt(&[1.0, -3.0, 3.0, 1.0]);
        let c = feasible_svd_chain(&cone, &x, &y).unwrap();
        assert!(c.is_feasible(&cone));
        assert!(c.reconstruction_error() < 1e-12);
        assert_eq!(c.waypoints().last().unwrap(), &y);
    }
}
