use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::body::ConvexBody;
use super::hits::exit_parameter;
use super::sample::random_unit_matrix;
use crate::error::{Error, Result};
use crate::lingeom::ChartPoint;
use crate::scalar::Real;

/// Distance between `A ∩ B_R` and `B ∩ B_R` (`B_R` the Frobenius ball of
/// radius `R` about the origin), estimated from radial functions.
///
/// From a common interior point `c`, each clipped body is star-shaped with
/// radial function `r(u) = min(exit of the body, exit of B_R)`. The value
/// returned is `max_u |r_A(u) - r_B(u)|` over `directions` seeded unit
/// directions and their negatives; for convex bodies containing `c` it
/// dominates the Hausdorff distance on the sampled directions.
///
/// The centre is the first of `B`'s reference point, `A`'s reference point
/// and the origin that lies in both bodies and inside `B_R`.
pub fn hausdorff_distance_clipped<T: Real>(a: &ConvexBody<T>, b: &ConvexBody<T>, radius: T, directions: usize, seed: u64) -> Result<T> {
    let zero = ChartPoint::zeros(a.shape());
    let center = [b.interior(), a.interior(), &zero]
        .into_iter()
        .find(|c| a.contains(c) && b.contains(c) && c.norm() < radius)
        .cloned()
        .ok_or_else(|| Error::EmptyClip(format!("{} / {}", a.label(), b.label())))?;
    hausdorff_distance_clipped_from(a, b, radius, directions, seed, &center)
}

/// As [`hausdorff_distance_clipped`] with an explicit common centre.
pub fn hausdorff_distance_clipped_from<T: Real>(
    a: &ConvexBody<T>,
    b: &ConvexBody<T>,
    radius: T,
    directions: usize,
    seed: u64,
    center: &ChartPoint<T>,
) -> Result<T> {
    a.shape().check(&b.shape())?;
    for body in [a, b] {
        if !body.contains(center) || center.norm() >= radius {
            return Err(Error::EmptyClip(body.label().to_string()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = center.matrix();
    let mut worst = T::zero();
    for _ in 0..directions {
        let u = random_unit_matrix::<T, _>(a.shape(), &mut rng);
        for d in [u.clone(), -u] {
            let diff = (radial(a, c, &d, radius) - radial(b, c, &d, radius)).abs();
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

fn radial<T: Real>(body: &ConvexBody<T>, c: &DMatrix<T>, u: &DMatrix<T>, radius: T) -> T {
    // |c + t u| = R with |u| = 1
    let cu = c.dot(u);
    let ball = -cu + (cu * cu - c.norm_squared() + radius * radius).sqrt();
    exit_parameter(body, c, u, T::one()).min(ball)
}
