use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::sample::gaussian_matrix;
use crate::error::{Error, Result};
use crate::lingeom::{operator_norm, ChartPoint, ChartShape, ProjectiveTransform};
use crate::scalar::Real;

/// `J = diag(I_p, -I_q)`. Positive definite on the planes `[I; X]` with
/// `|X| < 1`, so `O(p, q)` for this form preserves the operator-norm ball.
pub fn j_form<T: Real>(p: usize, q: usize) -> DMatrix<T> {
    DMatrix::from_fn(p + q, p + q, |i, j| {
        if i != j {
            T::zero()
        } else if i < p {
            T::one()
        } else {
            -T::one()
        }
    })
}

/// Element `M` of `so(p, p)`: `M^T J + J M = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndefiniteGenerator<T: Real> {
    p: usize,
    m: DMatrix<T>,
}

impl<T: Real> IndefiniteGenerator<T> {
    /// Checks the algebra identity to `1e-12` relative to `max(1, |M|)`.
    pub fn new(p: usize, m: DMatrix<T>) -> Result<Self> {
        if m.shape() != (2 * p, 2 * p) || p == 0 {
            return Err(Error::ShapeMismatch { expected: format!("{0}x{0}", 2 * p), found: format!("{}x{}", m.nrows(), m.ncols()) });
        }
        let g = Self { p, m };
        if g.j_defect() > T::lit(1e-12) * g.m.norm().max(T::one()) {
            return Err(Error::InvalidInput("matrix is not in so(p, p)".into()));
        }
        Ok(g)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    /// `|M^T J + J M|` (Frobenius).
    pub fn j_defect(&self) -> T {
        let j = j_form::<T>(self.p, self.p);
        (self.m.transpose() * &j + &j * &self.m).norm()
    }

    pub fn group(&self) -> OneParameterGroup<T> {
        OneParameterGroup { shape: ChartShape { p: self.p, q: self.p }, generator: self.m.clone() }
    }

    /// `exp(t M)` as a projective transformation.
    pub fn exp(&self, t: T) -> Result<ProjectiveTransform<T>> {
        self.group().evaluate(t)
    }
}

/// Random `[[A, B], [B^T, D]]` with antisymmetric `A`, `D`, scaled to
/// operator norm in `[0.25, 1]`.
pub fn random_so_pp<T: Real>(p: usize, seed: u64) -> IndefiniteGenerator<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gaussian_matrix::<T, _>(p, p, &mut rng);
    let b = gaussian_matrix::<T, _>(p, p, &mut rng);
    let d = gaussian_matrix::<T, _>(p, p, &mut rng);
    let mut m = DMatrix::zeros(2 * p, 2 * p);
    m.view_mut((0, 0), (p, p)).copy_from(&(&a - a.transpose()));
    m.view_mut((0, p), (p, p)).copy_from(&b);
    m.view_mut((p, 0), (p, p)).copy_from(&b.transpose());
    m.view_mut((p, p), (p, p)).copy_from(&(&d - d.transpose()));
    let target = T::lit(rng.random_range(0.25..=1.0));
    let n = operator_norm(&m);
    if n > T::zero() {
        m *= target / n;
    }
    IndefiniteGenerator { p, m }
}

/// `t -> exp(t G)` acting projectively.
#[derive(Debug, Clone, PartialEq)]
pub struct OneParameterGroup<T: Real> {
    shape: ChartShape,
    generator: DMatrix<T>,
}

impl<T: Real> OneParameterGroup<T> {
    pub fn new(shape: ChartShape, generator: DMatrix<T>) -> Result<Self> {
        let n = shape.ambient();
        if generator.shape() != (n, n) {
            return Err(Error::ShapeMismatch { expected: format!("{n}x{n}"), found: format!("{}x{}", generator.nrows(), generator.ncols()) });
        }
        Ok(Self { shape, generator })
    }

    pub fn shape(&self) -> ChartShape {
        self.shape
    }

    pub fn generator(&self) -> &DMatrix<T> {
        &self.generator
    }

    /// `exp(t G)` by scaling and squaring with a Pade approximant.
    pub fn evaluate(&self, t: T) -> Result<ProjectiveTransform<T>> {
        ProjectiveTransform::new(self.shape, (&self.generator * t).exp())
    }
}

/// Generator `diag(0_p, 1_q)`: `X -> e^t X`.
pub fn homothety_group<T: Real>(p: usize) -> Result<OneParameterGroup<T>> {
    let shape = ChartShape::square(p)?;
    let g = DMatrix::from_fn(2 * p, 2 * p, |i, j| if i == j && i >= p { T::one() } else { T::zero() });
    OneParameterGroup::new(shape, g)
}

/// Generator `[[0, 0], [-X0, I]]`, which is idempotent, so
/// `exp(t G) = [[I, 0], [(1 - e^t) X0, e^t I]]`: `X -> e^t (X - X0) + X0`.
pub fn rescaling_group<T: Real>(x0: &ChartPoint<T>) -> Result<OneParameterGroup<T>> {
    let shape = x0.shape();
    let (p, q) = (shape.p, shape.q);
    let mut g = DMatrix::zeros(p + q, p + q);
    g.view_mut((p, 0), (q, p)).copy_from(&(-x0.matrix()));
    g.view_mut((p, p), (q, q)).fill_with_identity();
    OneParameterGroup::new(shape, g)
}

/// `[[I, 0], [Y, I]]`: translation `X -> X + Y` by an integer matrix.
pub fn unipotent_translation<T: Real>(y: &DMatrix<i64>) -> Result<ProjectiveTransform<T>> {
    let (q, p) = y.shape();
    let shape = ChartShape::new(p, q)?;
    let mut g = DMatrix::identity(p + q, p + q);
    for i in 0..q {
        for j in 0..p {
            g[(p + i, j)] = T::lit(y[(i, j)] as f64);
        }
    }
    ProjectiveTransform::new(shape, g)
}

/// Automorphism of the operator-norm ball sending `x` to the origin:
/// `[[P^-1/2, -P^-1/2 X^T], [-Q^-1/2 X, Q^-1/2]]` with `P = I - X^T X`,
/// `Q = I - X X^T`.
pub fn ball_transvection<T: Real>(x: &ChartPoint<T>) -> Result<ProjectiveTransform<T>> {
    let shape = x.shape();
    let (p, q) = (shape.p, shape.q);
    let m = x.matrix();
    let inv_sqrt = |s: DMatrix<T>| -> Result<DMatrix<T>> {
        let eig = s.symmetric_eigen();
        if eig.eigenvalues.iter().any(|l| *l <= T::zero()) {
            return Err(Error::PointOutside("operator ball".into()));
        }
        let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| T::one() / l.sqrt()));
        Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
    };
    let pm = inv_sqrt(DMatrix::identity(p, p) - m.transpose() * m)?;
    let qm = inv_sqrt(DMatrix::identity(q, q) - m * m.transpose())?;
    let b = -(&pm * m.transpose());
    let c = -(&qm * m);
    ProjectiveTransform::from_blocks(&pm, &b, &c, &qm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_identity() {
        for seed in 0..5 {
            let g = random_so_pp::<f64>(2, seed);
            assert!(g.j_defect() < 1e-15);
            let e = g.matrix().exp();
            let j = j_form::<f64>(2, 2);
            assert!((e.transpose() * &j * &e - j).norm() < 1e-12);
        }
    }

    #[test]
    fn so22_has_dimension_six() {
        let gens: Vec<_> = (0..12).map(|s| crate::lingeom::linalg::vec_rows(random_so_pp::<f64>(2, s).matrix())).collect();
        let m = DMatrix::from_columns(&gens);
        assert_eq!(crate::lingeom::linalg::numerical_rank(&m, 1e-9), 6);
    }

    #[test]
    fn homothety_scales() {
        let h = homothety_group::<f64>(2).unwrap();
        let x = ChartPoint::from_rows(2, 2, &[0.3, -0.1, 0.2, 0.5]).unwrap();
        let y = h.evaluate(1.5).unwrap().apply(&x).unwrap();
        assert!((y.matrix() - x.matrix() * 1.5f64.exp()).norm() < 1e-12 * 1.5f64.exp());
        assert!((h.evaluate(0.0).unwrap().matrix() - DMatrix::identity(4, 4)).norm() < 1e-15);
    }

    #[test]
    fn rescaling_is_a_dilation() {
        let x0 = ChartPoint::from_rows(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let g = rescaling_group(&x0).unwrap();
        let x = ChartPoint::from_rows(2, 2, &[0.2, 0.1, -0.3, 0.4]).unwrap();
        for t in [-1.0, 0.5, 3.0] {
            let y = g.evaluate(t).unwrap().apply(&x).unwrap();
            let expect = (x.matrix() - x0.matrix()) * f64::exp(t) + x0.matrix();
            assert!((y.matrix() - &expect).norm() < 1e-12 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn translations_add() {
        let y1 = DMatrix::from_row_slice(2, 1, &[1i64, -2]);
        let y2 = DMatrix::from_row_slice(2, 1, &[3i64, 5]);
        let g1 = unipotent_translation::<f64>(&y1).unwrap();
        let g2 = unipotent_translation::<f64>(&y2).unwrap();
        let x = ChartPoint::from_rows(2, 1, &[0.25, 0.5]).unwrap();
        let z = g1.compose(&g2).unwrap().apply(&x).unwrap();
        assert!((z.matrix() - DMatrix::from_row_slice(2, 1, &[4.25, 3.5])).norm() < 1e-14);
    }

    #[test]
    fn transvection_sends_point_to_origin() {
        let x = ChartPoint::from_rows(3, 2, &[0.3, 0.1, -0.2, 0.4, 0.1, 0.1]).unwrap();
        let g = ball_transvection(&x).unwrap();
        assert!(g.apply(&x).unwrap().norm() < 1e-14);
        let j = j_form::<f64>(2, 3);
        let m = g.matrix();
        assert!((m.transpose() * &j * m - &j).norm() < 1e-12);
    }
}
