//! Points of the standard affine chart of `Gr_p(R^{p+q})`.
//!
//! A chart point is a `q x p` matrix `X`; it stands for the `p`-plane spanned by
//! the columns of the stacked block `[I_p; X]`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linalg::{numerical_rank, singular_values};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerances::TAU_RANK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChartShape {
    /// Dimension of the planes.
    pub p: usize,
    /// Dimension of the complement.
    pub q: usize,
}

impl ChartShape {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidInput(format!("chart shape needs p, q >= 1 (got p={p}, q={q})")));
        }
        Ok(Self { p, q })
    }

    pub fn square(p: usize) -> Result<Self> {
        Self::new(p, p)
    }

    /// Ambient dimension `p + q`.
    pub fn ambient(&self) -> usize {
        self.p + self.q
    }

    /// Real dimension of the chart, `p * q`.
    pub fn dim(&self) -> usize {
        self.p * self.q
    }

    pub fn is_square(&self) -> bool {
        self.p == self.q
    }

    pub(crate) fn check(&self, other: &ChartShape) -> Result<()> {
        if self != other {
            Err(Error::ShapeMismatch { expected: self.to_string(), found: other.to_string() })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for ChartShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gr_{}(R^{}) chart ({}x{} matrices)", self.p, self.ambient(), self.q, self.p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint<T: Real> {
    shape: ChartShape,
    m: DMatrix<T>,
}

impl<T: Real> ChartPoint<T> {
    pub fn new(shape: ChartShape, m: DMatrix<T>) -> Result<Self> {
        if m.nrows() != shape.q || m.ncols() != shape.p {
            return Err(Error::ShapeMismatch { expected: format!("{}x{}", shape.q, shape.p), found: format!("{}x{}", m.nrows(), m.ncols()) });
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("chart point has non-finite entries".into()));
        }
        Ok(Self { shape, m })
    }

    /// Infers the shape from the matrix dimensions (`q` rows, `p` columns).
    pub fn from_matrix(m: DMatrix<T>) -> Result<Self> {
        let shape = ChartShape::new(m.ncols(), m.nrows())?;
        Self::new(shape, m)
    }

    pub fn from_rows(q: usize, p: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != p * q {
            return Err(Error::InvalidInput(format!("expected {} entries, got {}", p * q, row_major.len())));
        }
        let data: Vec<T> = row_major.iter().map(|&x| T::lit(x)).collect();
        Self::new(ChartShape::new(p, q)?, DMatrix::from_row_slice(q, p, &data))
    }

    pub fn zeros(shape: ChartShape) -> Self {
        Self { shape, m: DMatrix::zeros(shape.q, shape.p) }
    }

    /// `I_p` in a square chart.
    pub fn identity(p: usize) -> Result<Self> {
        Ok(Self { shape: ChartShape::square(p)?, m: DMatrix::identity(p, p) })
    }

    /// Wraps a matrix known to have the right shape and finite entries.
    pub(crate) fn from_parts(shape: ChartShape, m: DMatrix<T>) -> Self {
        debug_assert_eq!((m.nrows(), m.ncols()), (shape.q, shape.p));
        Self { shape, m }
    }

    pub fn shape(&self) -> ChartShape {
        self.shape
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.m
    }

    pub fn norm(&self) -> T {
        self.m.norm()
    }

    /// `self + t * d`.
    pub fn offset(&self, d: &DMatrix<T>, t: T) -> Self {
        Self { shape: self.shape, m: &self.m + d * t }
    }

    /// The `(p+q) x p` block `[I_p; X]`.
    pub fn stacked(&self) -> DMatrix<T> {
        let (p, q) = (self.shape.p, self.shape.q);
        let mut s = DMatrix::zeros(p + q, p);
        s.view_mut((0, 0), (p, p)).fill_with_identity();
        s.view_mut((p, 0), (q, p)).copy_from(&self.m);
        s
    }
}

/// Direction `u v^T` of a rank-one line, with unit `u` and `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneDirection<T: Real> {
    u: DVector<T>,
    v: DVector<T>,
}

impl<T: Real> RankOneDirection<T> {
    pub fn new(u: DVector<T>, v: DVector<T>) -> Result<Self> {
        let nu = u.norm();
        let nv = v.norm();
        if nu == T::zero() || nv == T::zero() || !nu.is_finite() || !nv.is_finite() {
            return Err(Error::InvalidInput("rank-one direction needs nonzero finite u, v".into()));
        }
        Ok(Self { u: u / nu, v: v / nv })
    }

    /// Extracts the direction of a numerically rank-one matrix.
    pub fn from_matrix(s: &DMatrix<T>) -> Result<Self> {
        if numerical_rank(s, TAU_RANK) != 1 {
            return Err(Error::InvalidInput("matrix is not rank one".into()));
        }
        let svd = crate::lingeom::linalg::svd(s);
        let i = svd.singular_values.imax();
        let u = svd.u.expect("U").column(i).into_owned();
        let v = svd.v_t.expect("V^T").row(i).transpose();
        Self::new(u, v)
    }

    /// `e_i e_j^T` in a chart of the given shape.
    pub fn elementary(shape: ChartShape, i: usize, j: usize) -> Result<Self> {
        if i >= shape.q || j >= shape.p {
            return Err(Error::InvalidInput(format!("entry ({i},{j}) outside {}x{}", shape.q, shape.p)));
        }
        let mut u = DVector::zeros(shape.q);
        let mut v = DVector::zeros(shape.p);
        u[i] = T::one();
        v[j] = T::one();
        Self::new(u, v)
    }

    pub fn u(&self) -> &DVector<T> {
        &self.u
    }

    pub fn v(&self) -> &DVector<T> {
        &self.v
    }

    pub fn shape(&self) -> ChartShape {
        ChartShape { p: self.v.len(), q: self.u.len() }
    }

    /// The unit-Frobenius-norm matrix `u v^T`.
    pub fn matrix(&self) -> DMatrix<T> {
        &self.u * self.v.transpose()
    }
}

/// The affine line `t -> X + t S` with `S` of rank one.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneLine<T: Real> {
    pub base: ChartPoint<T>,
    pub direction: RankOneDirection<T>,
}

impl<T: Real> RankOneLine<T> {
    pub fn at(&self, t: T) -> ChartPoint<T> {
        self.base.offset(&self.direction.matrix(), t)
    }
}

/// Builds the rank-one line through `x` with direction `s`.
pub fn rank_one_line<T: Real>(x: &ChartPoint<T>, s: &RankOneDirection<T>) -> Result<RankOneLine<T>> {
    x.shape().check(&s.shape())?;
    Ok(RankOneLine { base: x.clone(), direction: s.clone() })
}

/// Dimension of the intersection of the planes represented by `x` and `y`,
/// i.e. `p - rank(X - Y)`.
pub fn intersection_dim<T: Real>(x: &ChartPoint<T>, y: &ChartPoint<T>) -> Result<usize> {
    x.shape().check(&y.shape())?;
    Ok(x.shape().p - numerical_rank(&(x.matrix() - y.matrix()), TAU_RANK))
}

/// Largest singular value, i.e. the operator norm.
pub fn operator_norm<T: Real>(m: &DMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}
