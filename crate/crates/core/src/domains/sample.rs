//! Seeded random sampling of directions and interior points.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::body::ConvexBody;
use super::hits::exit_parameter;
use crate::lingeom::{ChartPoint, ChartShape, RankOneDirection};
use crate::scalar::Real;

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<T> {
    DVector::from_fn(n, |_, _| T::lit(rng.sample::<f64, _>(StandardNormal)))
}

pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| T::lit(rng.sample::<f64, _>(StandardNormal)))
}

/// Uniformly distributed direction of unit Frobenius norm.
pub fn random_unit_matrix<T: Real, R: Rng + ?Sized>(shape: ChartShape, rng: &mut R) -> DMatrix<T> {
    loop {
        let m = gaussian_matrix::<T, _>(shape.q, shape.p, rng);
        let n = m.norm();
        if n > T::lit(1e-8) {
            return m / n;
        }
    }
}

pub fn random_rank_one<T: Real, R: Rng + ?Sized>(shape: ChartShape, rng: &mut R) -> RankOneDirection<T> {
    loop {
        let u = gaussian_vector(shape.q, rng);
        let v = gaussian_vector(shape.p, rng);
        if let Ok(d) = RankOneDirection::new(u, v) {
            return d;
        }
    }
}

/// Hit-and-run walk inside `body` started at `start`. Chords are clipped to
/// length `cap` on either side so unbounded bodies can be sampled; returns
/// one point per step.
pub fn hit_and_run<T: Real, R: Rng + ?Sized>(body: &ConvexBody<T>, start: &ChartPoint<T>, steps: usize, cap: T, rng: &mut R) -> Vec<ChartPoint<T>> {
    let shape = body.shape();
    let mut x = start.matrix().clone();
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let d = random_unit_matrix::<T, _>(shape, rng);
        let hi = exit_parameter(body, &x, &d, T::one()).min(cap);
        let lo = -exit_parameter(body, &x, &(-&d), T::one()).min(cap);
        // Stay strictly inside the chord.
        let u = T::lit(rng.random_range(0.0..1.0) * 0.998 + 0.001);
        let t = lo + (hi - lo) * u;
        let y = &x + &d * t;
        if body.contains_matrix(&y) {
            x = y;
        }
        out.push(ChartPoint::from_parts(shape, x.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn walk_stays_inside_and_is_seeded() {
        let b = ConvexBody::<f64>::operator_ball(2, 2).unwrap();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        let a = hit_and_run(&b, b.interior(), 200, 10.0, &mut r1);
        let c = hit_and_run(&b, b.interior(), 200, 10.0, &mut r2);
        assert_eq!(a, c);
        assert!(a.iter().all(|x| b.contains(x)));
    }

    #[test]
    fn unbounded_walk_respects_cap() {
        let f = ConvexBody::<f64>::full_chart(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = hit_and_run(&f, f.interior(), 50, 1.0, &mut rng);
        assert!(pts.iter().all(|x| x.norm() <= 50.0));
    }
}
