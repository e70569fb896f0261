use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::domains::sample::hit_and_run;
use crate::domains::ConvexBody;
use crate::lingeom::{operator_norm, ProjectiveTransform};
use crate::scalar::Real;

/// Outcome of a sampled symmetry check.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    pub check: String,
    pub p: usize,
    pub samples: usize,
    pub violations: usize,
    pub max_defect: f64,
    pub convention: Value,
}

/// Applies `g` to hit-and-run samples of the ball `B_{p,p}` and counts images
/// that escape the chart or the ball. `max_defect` is the largest change of
/// the boundary margin `1 - |X|`.
pub fn verify_ball_preserved<T: Real>(g: &ProjectiveTransform<T>, samples: usize, seed: u64) -> SymmetryReport {
    let shape = g.shape();
    let ball = ConvexBody::operator_ball(shape.q, shape.p).expect("valid shape");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = hit_and_run(&ball, ball.interior(), samples, T::lit(2.0), &mut rng);
    let mut violations = 0;
    let mut max_defect = 0f64;
    for x in &pts {
        match g.apply(x) {
            Ok(y) if ball.contains(&y) => {
                let change = (operator_norm(y.matrix()) - operator_norm(x.matrix())).abs().to_f64_lossy();
                max_defect = max_defect.max(change);
            }
            _ => violations += 1,
        }
    }
    SymmetryReport {
        check: "ball_preserved".into(),
        p: shape.p,
        samples: pts.len(),
        violations,
        max_defect,
        convention: serde_json::json!({ "j_form": "diag(I_p, -I_q)", "action": "(c + d X)(a + b X)^-1" }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::random_so_pp;

    #[test]
    fn identity_and_random_elements() {
        let id = ProjectiveTransform::<f64>::identity(crate::lingeom::ChartShape::square(2).unwrap());
        let r = verify_ball_preserved(&id, 100, 1);
        assert_eq!(r.violations, 0);
        assert!(r.max_defect < 1e-15);
        for s in 0..5 {
            let g = random_so_pp::<f64>(2, s).exp(2.0).unwrap();
            assert_eq!(verify_ball_preserved(&g, 200, s).violations, 0);
        }
    }
}
