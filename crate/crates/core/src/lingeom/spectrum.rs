//! Dominant eigenspace of a projective transformation.
//!
//! Only semisimple dominant blocks are handled: the dominant eigenvalues are
//! clustered by modulus, each distinct eigenvalue's kernel is computed, and a
//! kernel smaller than the algebraic multiplicity is rejected.

use nalgebra::DMatrix;

use super::linalg::{column_basis, null_space, singular_values};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerances::TAU_EIG;

#[derive(Debug, Clone, PartialEq)]
pub struct DominantSpectrum<T: Real> {
    /// Eigenvalue moduli of the `|det| = 1` representative, ascending.
    pub moduli: Vec<T>,
    /// Orthonormal basis (columns) of the real dominant eigenspace `E+`.
    pub dominant_subspace: DMatrix<T>,
    /// Largest Jordan block size among dominant eigenvalues. Always 1 here,
    /// since defective dominant blocks are rejected.
    pub jordan_size_bound: usize,
    pub is_diagonalizable: bool,
}

/// Eigen-structure of the dominant modulus cluster of a square matrix.
pub fn dominant_spectrum<T: Real>(g: &DMatrix<T>) -> Result<DominantSpectrum<T>> {
    dominant_spectrum_with(g, TAU_EIG)
}

pub fn dominant_spectrum_with<T: Real>(g: &DMatrix<T>, tau_eig: f64) -> Result<DominantSpectrum<T>> {
    let n = g.nrows();
    if n == 0 || g.ncols() != n {
        return Err(Error::InvalidInput("dominant_spectrum needs a nonempty square matrix".into()));
    }
    let det = g.determinant();
    if det == T::zero() || !det.is_finite() {
        return Err(Error::Singular);
    }
    let m = g * det.abs().powf(-T::one() / T::usize(n));
    let eig = m.complex_eigenvalues();
    let mut moduli: Vec<T> = eig.iter().map(|z| (z.re * z.re + z.im * z.im).sqrt()).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let top = *moduli.last().unwrap();
    let tau = T::lit(tau_eig);

    // Dominant eigenvalues in the closed upper half plane (conjugates implied).
    let dominant: Vec<(T, T)> = eig.iter().filter(|z| (z.re * z.re + z.im * z.im).sqrt() >= top * (T::one() - tau)).map(|z| (z.re, z.im)).collect();

    // Group numerically equal eigenvalues.
    let mut clusters: Vec<((T, T), usize)> = Vec::new();
    for &(re, im) in &dominant {
        let found = clusters.iter_mut().find(|((cr, ci), _)| {
            let (dr, di) = (*cr - re, *ci - im.abs());
            (dr * dr + di * di).sqrt() <= tau * top.max(T::one())
        });
        match found {
            Some((_, count)) => *count += 1,
            None => clusters.push(((re, im.abs()), 1)),
        }
    }

    let norm_m = singular_values(&m)[0];
    let null_tol = (tau_eig * 10.0).max(1e-9);
    let id = DMatrix::<T>::identity(n, n);
    let mut pieces: Vec<DMatrix<T>> = Vec::new();
    for ((re, im), count) in clusters {
        let is_real = im <= tau * top.max(T::one());
        let (kernel, algebraic) = if is_real {
            let shifted = &m - &id * re;
            (null_space_abs(&shifted, norm_m, null_tol), count)
        } else {
            // Real invariant plane of the pair: ker(M^2 - 2 re M + |z|^2 I).
            // `count` includes both conjugates.
            let quad = &m * &m - &m * (T::lit(2.0) * re) + &id * (re * re + im * im);
            (null_space_abs(&quad, norm_m * norm_m, null_tol), count)
        };
        if kernel.ncols() < algebraic {
            return Err(Error::NonDiagonalizableBeyondTolerance { algebraic, geometric: kernel.ncols() });
        }
        pieces.push(kernel);
    }
    let total: usize = pieces.iter().map(|k| k.ncols()).sum();
    let mut stacked = DMatrix::zeros(n, total);
    let mut col = 0;
    for k in &pieces {
        stacked.view_mut((0, col), (n, k.ncols())).copy_from(k);
        col += k.ncols();
    }
    let dominant_subspace = column_basis(&stacked, 1e-8);
    Ok(DominantSpectrum { moduli, dominant_subspace, jordan_size_bound: 1, is_diagonalizable: true })
}

/// Null space with a threshold relative to `scale` instead of the matrix's own
/// largest singular value, so that an exactly zero shift is still detected.
fn null_space_abs<T: Real>(m: &DMatrix<T>, scale: T, tol: f64) -> DMatrix<T> {
    let top = singular_values(m).first().copied().unwrap_or_else(T::zero);
    if top <= scale * T::lit(tol) {
        return DMatrix::identity(m.ncols(), m.ncols());
    }
    null_space(m, (scale * T::lit(tol) / top).to_f64_lossy())
}
