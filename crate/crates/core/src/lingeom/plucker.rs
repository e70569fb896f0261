//! Plücker embedding `Gr_p(R^n) -> P(wedge^p R^n)` and compound matrices.
//!
//! Coordinates are indexed by `p`-subsets of rows in lexicographic order.

use nalgebra::{DMatrix, DVector};

use super::chart::ChartPoint;
use super::linalg::{combinations, minor, projective_angle};
use super::transform::ProjectiveTransform;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unit-norm Plücker coordinates; the first coordinate that is not
/// negligible is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PluckerVector<T: Real> {
    coords: DVector<T>,
}

impl<T: Real> PluckerVector<T> {
    /// Normalizes an arbitrary nonzero vector of `wedge^p` coordinates.
    pub fn from_coords(v: DVector<T>) -> Result<Self> {
        let n = v.norm();
        if n == T::zero() || !n.is_finite() {
            return Err(Error::InvalidInput("Plücker vector must be nonzero and finite".into()));
        }
        let mut v = v / n;
        let tiny = T::lit(1e-14);
        if let Some(first) = v.iter().copied().find(|c| c.abs() > tiny) {
            if first < T::zero() {
                v.neg_mut();
            }
        }
        Ok(Self { coords: v })
    }

    pub fn coords(&self) -> &DVector<T> {
        &self.coords
    }

    /// Angle between the two projective points.
    pub fn angle(&self, other: &Self) -> T {
        projective_angle(&self.coords, &other.coords)
    }
}

/// Matrix of `p x p` minors of `g` (the `p`-th compound), rows and columns in
/// lexicographic subset order.
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundTransform<T: Real> {
    p: usize,
    matrix: DMatrix<T>,
}

impl<T: Real> CompoundTransform<T> {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }

    /// Image of a Plücker point, renormalized.
    pub fn act(&self, x: &PluckerVector<T>) -> Result<PluckerVector<T>> {
        PluckerVector::from_coords(&self.matrix * x.coords())
    }
}

/// Minors of the `n x p` representative `[I_p; X]`.
pub fn plucker_embed<T: Real>(x: &ChartPoint<T>) -> PluckerVector<T> {
    let stacked = x.stacked();
    let n = stacked.nrows();
    let p = stacked.ncols();
    let cols: Vec<usize> = (0..p).collect();
    let coords = DVector::from_iterator(super::linalg::binomial(n, p), combinations(n, p).iter().map(|rows| minor(&stacked, rows, &cols)));
    // The coordinate for rows {0..p} is det(I) = 1, so the vector is nonzero.
    PluckerVector::from_coords(coords).expect("Plücker coordinates of a chart point are nonzero")
}

/// `p`-th compound of an arbitrary square matrix.
pub fn compound_matrix<T: Real>(g: &DMatrix<T>, p: usize) -> DMatrix<T> {
    let n = g.nrows();
    let subsets = combinations(n, p);
    let k = subsets.len();
    DMatrix::from_fn(k, k, |i, j| minor(g, &subsets[i], &subsets[j]))
}

pub fn compound<T: Real>(g: &ProjectiveTransform<T>) -> CompoundTransform<T> {
    let p = g.shape().p;
    CompoundTransform { p, matrix: compound_matrix(g.matrix(), p) }
}
