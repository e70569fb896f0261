use super::body::ConvexBody;
use super::hits::certify_boundary;
use crate::error::Result;
use crate::lingeom::ChartPoint;
use crate::scalar::Real;
use crate::tolerances::EPS_BOUNDARY;

/// Tangent cone `e + union_{t>0} t (body - e)` at a boundary point.
///
/// `e` is first moved onto the boundary along the segment from the interior
/// reference point (it may sit up to a relative `1e-10` off the boundary);
/// the resulting point becomes the apex.
pub fn tangent_cone<T: Real>(body: &ConvexBody<T>, e: &ChartPoint<T>) -> Result<ConvexBody<T>> {
    let base = certify_boundary(body, e, EPS_BOUNDARY)?;
    Ok(ConvexBody::tangent_cone_unchecked(body.clone(), base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use nalgebra::DMatrix;

    fn pt(v: f64) -> ChartPoint<f64> {
        ChartPoint::from_rows(1, 1, &[v]).unwrap()
    }

    #[test]
    fn interval_tangent_cone() {
        let b = ConvexBody::<f64>::operator_ball(1, 1).unwrap();
        let tc = tangent_cone(&b, &pt(1.0)).unwrap();
        assert!(tc.is_cone());
        assert_eq!(tc.apex().unwrap().matrix()[(0, 0)], 1.0);
        for y in [-1e6, -3.0, 0.0, 0.999_999] {
            assert!(tc.contains(&pt(y)), "{y}");
        }
        for y in [1.0, 1.000_001, 5.0] {
            assert!(!tc.contains(&pt(y)), "{y}");
        }
    }

    #[test]
    fn cone_is_its_own_tangent_cone() {
        let c = ConvexBody::<f64>::half_cone(2).unwrap();
        let tc = tangent_cone(&c, &ChartPoint::zeros(c.shape())).unwrap();
        let mut state = 1u64;
        for _ in 0..1000 {
            let v: Vec<f64> = (0..4)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
                })
                .collect();
            let x = DMatrix::from_row_slice(2, 2, &v);
            assert_eq!(c.contains_matrix(&x), tc.contains_matrix(&x));
        }
    }

    #[test]
    fn scan_is_monotone() {
        let b = ConvexBody::<f64>::operator_ball(2, 2).unwrap();
        let tc = tangent_cone(&b, &ChartPoint::identity(2).unwrap()).unwrap();
        // V = Y - I with V + V^T < 0 but far from I.
        let y = DMatrix::from_row_slice(2, 2, &[-30.0, 4.0, 1.0, -2.0]);
        let k = tc.tangent_scan(&y).unwrap();
        assert!(k > 0);
        let crate::domains::BodyKind::TangentCone { inner, base } = tc.kind() else { panic!() };
        for j in k..=40 {
            let s = 0.5f64.powi(j);
            assert!(inner.contains_matrix(&(base.matrix() + (&y - base.matrix()) * s)));
        }
    }

    #[test]
    fn interior_point_is_not_boundary() {
        let b = ConvexBody::<f64>::operator_ball(1, 1).unwrap();
        assert!(matches!(tangent_cone(&b, &pt(0.5)), Err(Error::NotBoundary { .. })));
        assert!(matches!(tangent_cone(&b, &pt(1.5)), Err(Error::NotBoundary { .. })));
    }
}
