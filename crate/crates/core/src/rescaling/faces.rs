use serde::Serialize;

use crate::domains::{boundary_adjacent, certify_boundary, ConvexBody};
use crate::error::Result;
use crate::lingeom::ChartPoint;
use crate::metric::{hilbert_lower_bound, k_estimate, MetricBudget};
use crate::tolerances::EPS_BOUNDARY;

/// Growth allowed over the second half of the sequence for `K^(N)` to count
/// as bounded.
const BOUNDED_GROWTH: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct FaceRelationVerdict {
    /// Chain estimates with at most `N` segments, one per sequence index.
    pub estimates: Vec<f64>,
    pub lower_bounds: Vec<f64>,
    pub bounded: bool,
    /// Adjacency steps joining the limits, when a route within `N` steps was found.
    pub reachable_in: Option<usize>,
    /// Bounded metric but no adjacency route: contradicts face equality.
    pub falsification: bool,
    pub seed: u64,
}

/// Tracks `K^(N)(x_n, y_n)` along two sequences approaching the boundary.
///
/// The estimates count as bounded when the growth over the second half of
/// the sequence is at most `0.1 (1 + K)`. In that case the limits (taken
/// as the last members pushed onto the boundary) are joined by the chain
/// of the last estimate: its waypoints are pushed to the boundary the same
/// way and consecutive ones must be `boundary_adjacent`.
pub fn face_relation_probe(
    body: &ConvexBody<f64>,
    xs: &[ChartPoint<f64>],
    ys: &[ChartPoint<f64>],
    n: usize,
    budget: &MetricBudget,
    seed: u64,
) -> Result<FaceRelationVerdict> {
    let budget = MetricBudget { max_segments: Some(n.max(1)), ..*budget };
    let mut estimates = Vec::new();
    let mut lower_bounds = Vec::new();
    let mut last_chain = None;
    for (x, y) in xs.iter().zip(ys) {
        let est = k_estimate(body, x, y, &budget, seed)?;
        lower_bounds.push(hilbert_lower_bound(body, x, y)?);
        estimates.push(est.value);
        last_chain = Some(est.chain);
    }
    let len = estimates.len();
    let bounded = len >= 2 && {
        let mid = estimates[len / 2];
        let last = estimates[len - 1];
        last.is_finite() && last - mid <= BOUNDED_GROWTH * (1.0 + mid)
    };
    let mut reachable_in = None;
    if bounded {
        let push = |w: &ChartPoint<f64>| certify_boundary(body, &push_out(body, w), EPS_BOUNDARY).ok();
        let (Some(x), Some(y)) = (push(xs.last().unwrap()), push(ys.last().unwrap())) else {
            return Ok(FaceRelationVerdict { estimates, lower_bounds, bounded, reachable_in, falsification: false, seed });
        };
        if boundary_adjacent(body, &x, &y) {
            reachable_in = Some(usize::from(x.matrix() != y.matrix()));
        } else if let Some(chain) = last_chain {
            let mut route: Vec<ChartPoint<f64>> = vec![x.clone()];
            for w in &chain.waypoints()[1..chain.waypoints().len().saturating_sub(1)] {
                if let Some(b) = push(w) {
                    route.push(b);
                }
            }
            route.push(y.clone());
            if route.len() - 1 <= n && route.windows(2).all(|w| boundary_adjacent(body, &w[0], &w[1])) {
                reachable_in = Some(route.len() - 1);
            }
        }
    }
    Ok(FaceRelationVerdict { falsification: bounded && reachable_in.is_none(), estimates, lower_bounds, bounded, reachable_in, seed })
}

/// The exit point of the ray from the interior reference point through `w`.
fn push_out(body: &ConvexBody<f64>, w: &ChartPoint<f64>) -> ChartPoint<f64> {
    let c = body.interior();
    let d = w.matrix() - c.matrix();
    if d.norm() == 0.0 {
        return w.clone();
    }
    let t = crate::domains::exit_parameter(body, c.matrix(), &d, 1.0);
    if !t.is_finite() {
        return w.clone();
    }
    c.offset(&d, t)
}
