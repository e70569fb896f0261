//! Projective transformations acting on chart points by fractional-linear maps.

use nalgebra::DMatrix;

use super::chart::{ChartPoint, ChartShape};
use super::linalg::reciprocal_condition;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerances::EPS_SINGULAR;

/// An element of `PGL_{p+q}(R)` stored with `|det| = 1`.
///
/// Row blocks read `[[a, b], [c, d]]` with `a` of size `p x p` and `d` of size
/// `q x q`. The chart action is `X -> (c + d X)(a + b X)^{-1}`, which is the
/// induced action on column blocks `[I_p; X]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveTransform<T: Real> {
    shape: ChartShape,
    g: DMatrix<T>,
}

impl<T: Real> ProjectiveTransform<T> {
    pub fn new(shape: ChartShape, g: DMatrix<T>) -> Result<Self> {
        let n = shape.ambient();
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::ShapeMismatch { expected: format!("{n}x{n}"), found: format!("{}x{}", g.nrows(), g.ncols()) });
        }
        let det = g.determinant();
        if det == T::zero() || !det.is_finite() {
            return Err(Error::Singular);
        }
        let scale = det.abs().powf(-T::one() / T::usize(n));
        Ok(Self { shape, g: g * scale })
    }

    pub fn identity(shape: ChartShape) -> Self {
        Self { shape, g: DMatrix::identity(shape.ambient(), shape.ambient()) }
    }

    pub fn from_blocks(a: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>, d: &DMatrix<T>) -> Result<Self> {
        let shape = ChartShape::new(a.nrows(), d.nrows())?;
        let (p, q) = (shape.p, shape.q);
        let dims_ok = a.shape() == (p, p) && b.shape() == (p, q) && c.shape() == (q, p) && d.shape() == (q, q);
        if !dims_ok {
            return Err(Error::ShapeMismatch {
                expected: format!("blocks {p}x{p}, {p}x{q}, {q}x{p}, {q}x{q}"),
                found: format!("{:?} {:?} {:?} {:?}", a.shape(), b.shape(), c.shape(), d.shape()),
            });
        }
        let mut g = DMatrix::zeros(p + q, p + q);
        g.view_mut((0, 0), (p, p)).copy_from(a);
        g.view_mut((0, p), (p, q)).copy_from(b);
        g.view_mut((p, 0), (q, p)).copy_from(c);
        g.view_mut((p, p), (q, q)).copy_from(d);
        Self::new(shape, g)
    }

    pub fn shape(&self) -> ChartShape {
        self.shape
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn a(&self) -> DMatrix<T> {
        self.g.view((0, 0), (self.shape.p, self.shape.p)).into_owned()
    }

    pub fn b(&self) -> DMatrix<T> {
        self.g.view((0, self.shape.p), (self.shape.p, self.shape.q)).into_owned()
    }

    pub fn c(&self) -> DMatrix<T> {
        self.g.view((self.shape.p, 0), (self.shape.q, self.shape.p)).into_owned()
    }

    pub fn d(&self) -> DMatrix<T> {
        self.g.view((self.shape.p, self.shape.p), (self.shape.q, self.shape.q)).into_owned()
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.shape.check(&other.shape)?;
        Self::new(self.shape, &self.g * &other.g)
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self.g.clone().try_inverse().ok_or(Error::Singular)?;
        Self::new(self.shape, inv)
    }

    /// Chart action `(c + d X)(a + b X)^{-1}`.
    pub fn apply(&self, x: &ChartPoint<T>) -> Result<ChartPoint<T>> {
        self.shape.check(&x.shape())?;
        let (p, q) = (self.shape.p, self.shape.q);
        let a = self.g.view((0, 0), (p, p));
        let b = self.g.view((0, p), (p, q));
        let c = self.g.view((p, 0), (q, p));
        let d = self.g.view((p, p), (q, q));
        let den = a + b * x.matrix();
        let num = c + d * x.matrix();
        let rcond = reciprocal_condition(&den);
        if rcond < T::lit(EPS_SINGULAR) {
            let condition = if rcond == T::zero() { f64::INFINITY } else { 1.0 / rcond.to_f64_lossy() };
            return Err(Error::ChartEscape { condition });
        }
        // Y = num * den^{-1}  <=>  den^T Y^T = num^T
        let yt = den.transpose().lu().solve(&num.transpose()).ok_or(Error::ChartEscape { condition: f64::INFINITY })?;
        ChartPoint::new(self.shape, yt.transpose())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(r: usize, c: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(r, c, v)
    }

    #[test]
    fn identity_fixes_points() {
        let x = ChartPoint::<f64>::from_rows(2, 3, &[0.1, 0.2, 0.3, -0.4, 0.5, 0.6]).unwrap();
        let g = ProjectiveTransform::identity(x.shape());
        assert_eq!(g.apply(&x).unwrap(), x);
    }

    #[test]
    fn unit_determinant_after_normalization() {
        let shape = ChartShape::square(1).unwrap();
        let g = ProjectiveTransform::new(shape, m(2, 2, &[3.0, 0.0, 0.0, 1.0])).unwrap();
        assert!((g.matrix().determinant().abs() - 1.0).abs() < 1e-14);
        assert!(ProjectiveTransform::new(shape, DMatrix::<f64>::zeros(2, 2)).is_err());
    }

    #[test]
    fn cayley_block_sends_zero_to_minus_one() {
        // a = -1, b = 1, c = 1, d = 1 for p = q = 1.
        let g = ProjectiveTransform::from_blocks(&m(1, 1, &[-1.0]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0])).unwrap();
        let x = ChartPoint::<f64>::from_rows(1, 1, &[0.0]).unwrap();
        let y = g.apply(&x).unwrap();
        assert!((y.matrix()[(0, 0)] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn dilation_about_a_point() {
        let x0 = m(2, 2, &[0.2, 0.1, -0.3, 0.4]);
        let e = 2.5;
        let g = ProjectiveTransform::from_blocks(&DMatrix::identity(2, 2), &DMatrix::zeros(2, 2), &(&x0 * (1.0 - e)), &(DMatrix::identity(2, 2) * e)).unwrap();
        let x = ChartPoint::<f64>::from_rows(2, 2, &[0.5, -0.2, 0.7, 0.1]).unwrap();
        let expect = (x.matrix() - &x0) * e + &x0;
        assert!((g.apply(&x).unwrap().matrix() - expect).norm() < 1e-14);
    }

    #[test]
    fn escape_is_reported() {
        // X -> X (1 - X)^{-1}-style map singular at X = 1.
        let g = ProjectiveTransform::from_blocks(&m(1, 1, &[1.0]), &m(1, 1, &[-1.0]), &m(1, 1, &[0.0]), &m(1, 1, &[1.0])).unwrap();
        let x = ChartPoint::<f64>::from_rows(1, 1, &[1.0]).unwrap();
        assert!(matches!(g.apply(&x), Err(Error::ChartEscape { .. })));
    }

    #[test]
    fn composition_law() {
        let shape = ChartShape::new(2, 1).unwrap();
        let g = ProjectiveTransform::new(shape, m(3, 3, &[1.0, 0.1, 0.0, 0.2, 1.0, 0.3, 0.0, -0.1, 1.0])).unwrap();
        let h = ProjectiveTransform::new(shape, m(3, 3, &[0.9, 0.0, 0.2, 0.1, 1.1, 0.0, 0.3, 0.0, 1.0])).unwrap();
        let x = ChartPoint::<f64>::from_rows(1, 2, &[0.3, -0.2]).unwrap();
        let lhs = g.apply(&h.apply(&x).unwrap()).unwrap();
        let rhs = g.compose(&h).unwrap().apply(&x).unwrap();
        assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-13);
    }
}
