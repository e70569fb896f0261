use nalgebra::DMatrix;

use crate::domains::{is_r_proper, line_inside, tangent_cone, ConvexBody, RProperVerdict, SearchBudget};
use crate::error::{Error, Result};
use crate::lingeom::ChartPoint;

/// Searches the tangent cone of the operator-norm ball `B_{q,p}` at the
/// partial isometry `[I; 0]` (or `[I 0]`) for a rank-one line.
///
/// For `p != q` the witness is re-verified at sampled `|t| <= t_big` and its
/// absence is `WitnessNotFound`. With `p = q` the point is the identity and
/// the verdict is returned as is (the control run).
pub fn pnotq_failure_demo(p: usize, q: usize, budget: &SearchBudget, seed: u64) -> Result<RProperVerdict<f64>> {
    let ball = ConvexBody::operator_ball(q, p)?;
    let e = ChartPoint::new(ball.shape(), DMatrix::from_fn(q, p, |i, j| if i == j { 1.0 } else { 0.0 }))?;
    let cone = tangent_cone(&ball, &e)?;
    let verdict = is_r_proper(&cone, budget, seed);
    if p == q {
        return Ok(verdict);
    }
    match &verdict.witness {
        Some((x, s)) if line_inside(&cone, x, s, budget.t_big) => Ok(verdict),
        _ => Err(Error::WitnessNotFound),
    }
}
