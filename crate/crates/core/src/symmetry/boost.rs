use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lingeom::linalg::{numerical_rank, singular_values};
use crate::lingeom::{compound_matrix, plucker_embed, ChartPoint, ChartShape, PluckerVector, ProjectiveTransform};
use crate::scalar::Real;
use crate::tolerances::TAU_RANK;

/// `[[cosh t I, sinh t I], [sinh t I, cosh t I]]`, an element of `O(p, p)`
/// pushing the ball toward `I`.
pub fn boost<T: Real>(p: usize, t: T) -> Result<ProjectiveTransform<T>> {
    let id = DMatrix::<T>::identity(p, p);
    let (c, s) = (&id * t.cosh(), &id * t.sinh());
    ProjectiveTransform::from_blocks(&c, &s, &s, &c)
}

/// Unit-norm compound representatives of a divergent sequence of
/// automorphisms and their rank-one limit.
#[derive(Debug, Clone)]
pub struct DegenerateLimit<T: Real> {
    pub parameters: Vec<T>,
    pub sequence: Vec<DMatrix<T>>,
    pub limit: DMatrix<T>,
    /// `|S_n - S|` for each member of the sequence.
    pub residuals: Vec<T>,
    pub rank: usize,
    /// Second-to-first singular value ratio of the limit.
    pub gap: T,
    pub image: Option<PluckerVector<T>>,
    /// Projective angle between the image and the Plücker point of `e`.
    pub image_angle: Option<T>,
}

/// Limit of the compounds of `boost(p, t)` conjugated by `X -> e X`, which
/// moves the attracting point from `I` to the orthogonal `e`.
pub fn boost_degenerate_limit_at<T: Real>(e: &ChartPoint<T>, ts: &[T]) -> Result<DegenerateLimit<T>> {
    let shape = e.shape();
    if !shape.is_square() {
        return Err(Error::InvalidInput("boosts need p = q".into()));
    }
    if ts.is_empty() {
        return Err(Error::InvalidInput("empty parameter sequence".into()));
    }
    let p = shape.p;
    let mut k = DMatrix::identity(2 * p, 2 * p);
    k.view_mut((p, p), (p, p)).copy_from(e.matrix());
    let k_inv = k.clone().try_inverse().ok_or(Error::Singular)?;
    let ck = compound_matrix(&k, p);
    let ck_inv = compound_matrix(&k_inv, p);
    let sequence: Vec<DMatrix<T>> = ts
        .iter()
        .map(|&t| -> Result<DMatrix<T>> {
            let g = boost(p, t)?;
            let c = &ck * compound_matrix(g.matrix(), p) * &ck_inv;
            Ok(normalize_rep(c))
        })
        .collect::<Result<_>>()?;
    let limit = sequence.last().unwrap().clone();
    let residuals = sequence.iter().map(|s| (s - &limit).norm()).collect();
    let sv = singular_values(&limit);
    let gap = if sv.len() > 1 { sv[1] / sv[0] } else { T::zero() };
    let rank = numerical_rank(&limit, TAU_RANK);
    let (image, image_angle) = if rank == 1 {
        let svd = crate::lingeom::linalg::svd(&limit);
        let u = svd.u.ok_or(Error::Singular)?;
        let k = svd.singular_values.imax();
        let img = PluckerVector::from_coords(DVector::from(u.column(k)))?;
        let target = plucker_embed(&ChartPoint::from_parts(ChartShape { p, q: p }, e.matrix().clone()));
        let angle = img.angle(&target);
        (Some(img), Some(angle))
    } else {
        (None, None)
    };
    Ok(DegenerateLimit { parameters: ts.to_vec(), sequence, limit, residuals, rank, gap, image, image_angle })
}

/// As [`boost_degenerate_limit_at`] for `e = I`; fails unless the final
/// representative has numerical rank one.
pub fn boost_degenerate_limit<T: Real>(p: usize, ts: &[T]) -> Result<DegenerateLimit<T>> {
    let lim = boost_degenerate_limit_at(&ChartPoint::identity(p)?, ts)?;
    if lim.rank != 1 {
        return Err(Error::ConvergenceNotReached { rank: lim.rank });
    }
    Ok(lim)
}

/// Unit Frobenius norm, sign fixed by the largest-magnitude entry.
fn normalize_rep<T: Real>(m: DMatrix<T>) -> DMatrix<T> {
    let n = m.norm();
    let (mut best, mut val) = (T::zero(), T::zero());
    for x in m.iter() {
        if x.abs() > best {
            best = x.abs();
            val = *x;
        }
    }
    let sign = if val < T::zero() { -T::one() } else { T::one() };
    m * (sign / n)
}
