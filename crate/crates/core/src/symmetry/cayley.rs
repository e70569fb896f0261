use nalgebra::DMatrix;
use serde::Serialize;

use crate::domains::ConvexBody;
use crate::error::{Error, Result};
use crate::lingeom::{ChartPoint, ChartShape, ProjectiveTransform};
use crate::scalar::Real;

/// Points of the ball used to decide the orientation of the Cayley image.
const ORIENTATION_SAMPLES: usize = 8;

/// Cayley map from the operator-norm ball to the cone `X + X^T > 0`.
#[derive(Debug, Clone)]
pub struct CayleyMap<T: Real> {
    pub transform: ProjectiveTransform<T>,
    /// Whether `X -> -X` was composed after the block `[[-I, A^-1], [I, A^-1]]`.
    pub sign_flipped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CayleyConvention {
    pub block: &'static str,
    pub sign_flipped: bool,
    pub formula: &'static str,
    /// The boundary point sent to the origin.
    pub zero_preimage: &'static str,
    /// The boundary point where the map is singular.
    pub singular_at: &'static str,
}

impl<T: Real> CayleyMap<T> {
    pub fn convention(&self) -> CayleyConvention {
        CayleyConvention {
            block: "[[-I, A^-1], [I, A^-1]]",
            sign_flipped: self.sign_flipped,
            formula: if self.sign_flipped { "(I + A^-1 X)(I - A^-1 X)^-1" } else { "(I + A^-1 X)(A^-1 X - I)^-1" },
            zero_preimage: "-A",
            singular_at: "A",
        }
    }
}

/// Cayley transform for an orthogonal `A`.
///
/// The raw block sends the ball onto `X + X^T < 0`; the orientation is
/// checked on a fixed set of ball points and, when the image is not in the
/// positive cone, `X -> -X` is composed on the left.
pub fn cayley<T: Real>(p: usize, a: &DMatrix<T>) -> Result<CayleyMap<T>> {
    if a.shape() != (p, p) {
        return Err(Error::ShapeMismatch { expected: format!("{p}x{p}"), found: format!("{}x{}", a.nrows(), a.ncols()) });
    }
    let defect = (a.transpose() * a - DMatrix::identity(p, p)).norm();
    if defect.to_f64_lossy() > 1e-10 {
        return Err(Error::NotOrthogonal { defect: defect.to_f64_lossy() });
    }
    let a_inv = a.transpose();
    let id = DMatrix::identity(p, p);
    let raw = ProjectiveTransform::from_blocks(&(-&id), &a_inv, &id, &a_inv)?;
    let cone = ConvexBody::half_cone(p)?;
    let shape = ChartShape::square(p)?;
    let samples = orientation_samples::<T>(p);
    let in_cone = |g: &ProjectiveTransform<T>| samples.iter().all(|x| g.apply(x).is_ok_and(|y| cone.contains(&y)));
    if in_cone(&raw) {
        return Ok(CayleyMap { transform: raw, sign_flipped: false });
    }
    let mut flip = DMatrix::identity(2 * p, 2 * p);
    flip.view_mut((p, p), (p, p)).fill_with_identity();
    flip.view_mut((p, p), (p, p)).neg_mut();
    let fixed = ProjectiveTransform::new(shape, flip)?.compose(&raw)?;
    if !in_cone(&fixed) {
        return Err(Error::InvalidInput("Cayley image is in neither orientation of the cone".into()));
    }
    Ok(CayleyMap { transform: fixed, sign_flipped: true })
}

fn orientation_samples<T: Real>(p: usize) -> Vec<ChartPoint<T>> {
    (0..ORIENTATION_SAMPLES)
        .map(|k| {
            let m = DMatrix::from_fn(p, p, |i, j| {
                let s = ((k * 7 + i * 3 + j * 5) % 11) as f64 / 11.0 - 0.5;
                T::lit(s * 0.9 / p as f64)
            });
            ChartPoint::from_parts(ChartShape { p, q: p }, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_orientation() {
        let c = cayley::<f64>(1, &DMatrix::from_element(1, 1, 1.0)).unwrap();
        assert!(c.sign_flipped);
        let img = c.transform.apply(&ChartPoint::from_rows(1, 1, &[0.0]).unwrap()).unwrap();
        assert!((img.matrix()[(0, 0)] - 1.0).abs() < 1e-15);
        let zero = c.transform.apply(&ChartPoint::from_rows(1, 1, &[-1.0]).unwrap()).unwrap();
        assert!(zero.norm() < 1e-15);
        assert!(c.transform.apply(&ChartPoint::from_rows(1, 1, &[1.0]).unwrap()).is_err());
    }

    #[test]
    fn rejects_non_orthogonal() {
        assert!(matches!(cayley::<f64>(2, &(DMatrix::identity(2, 2) * 1.1)), Err(Error::NotOrthogonal { .. })));
    }
}
