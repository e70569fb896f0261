//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Dyn, SVD};

use crate::scalar::Real;

/// Full thin SVD, checked by recomposition.
///
/// nalgebra's bidiagonal iteration can stop on a wrong deflation when its
/// convergence threshold is machine epsilon (seen on rank-deficient 3x2
/// inputs, with errors of a few percent). The threshold is loosened step by
/// step until `U S V^T` reproduces the input; the last resort is the
/// symmetric eigendecomposition of `[[0, M], [M^T, 0]]`.
pub fn svd<T: Real>(m: &DMatrix<T>) -> SVD<T, Dyn, Dyn> {
    let accept = T::lit(64.0) * T::default_epsilon() * m.norm();
    for eps in [T::lit(8.0) * T::default_epsilon(), T::lit(1e-14), T::lit(1e-13), T::lit(1e-12)] {
        if let Some(s) = m.clone().try_svd(true, true, eps, 0) {
            if s.clone().recompose().is_ok_and(|r| (r - m).norm() <= accept) {
                return s;
            }
        }
    }
    svd_by_eigen(m)
}

fn svd_by_eigen<T: Real>(m: &DMatrix<T>) -> SVD<T, Dyn, Dyn> {
    let (r, c) = m.shape();
    let k = r.min(c);
    let mut h = DMatrix::zeros(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(m);
    h.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..r + c).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let root2 = T::lit(2.0).sqrt();
    let mut u = DMatrix::zeros(r, k);
    let mut vt = DMatrix::zeros(k, c);
    let mut sv = DVector::zeros(k);
    for (j, &i) in order.iter().take(k).enumerate() {
        let w = eig.eigenvectors.column(i);
        sv[j] = eig.eigenvalues[i].max(T::zero());
        u.set_column(j, &(w.rows(0, r) * root2));
        vt.set_row(j, &(w.rows(r, c) * root2).transpose());
    }
    SVD { u: Some(u), v_t: Some(vt), singular_values: sv }
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<T> = svd(m).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Number of singular values above `tau` times the largest one.
pub fn numerical_rank<T: Real>(m: &DMatrix<T>, tau: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > T::zero() => {
            let cut = top * T::lit(tau);
            s.iter().filter(|&&x| x > cut).count()
        }
        _ => 0,
    }
}

/// Ratio of smallest to largest singular value of a square matrix.
pub fn reciprocal_condition<T: Real>(m: &DMatrix<T>) -> T {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > T::zero() => lo / hi,
        _ => T::zero(),
    }
}

/// Orthonormal basis (as columns) of the null space of `m`.
///
/// A singular value counts as zero when it is at most `tol` times the largest
/// singular value (or the matrix is identically zero).
pub fn null_space<T: Real>(m: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let n = m.ncols();
    // Pad to at least n rows so the thin SVD yields a full right basis.
    let padded = if m.nrows() < n {
        let mut p = DMatrix::<T>::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd(&padded);
    let v_t = svd.v_t.expect("requested V^T");
    let top = svd.singular_values.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let cut = top * T::lit(tol);
    let cols: Vec<DVector<T>> =
        svd.singular_values.iter().enumerate().filter(|(_, &s)| top == T::zero() || s <= cut).map(|(i, _)| v_t.row(i).transpose()).collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the column span of `m`, dropping directions whose
/// singular value is below `tol` relative to the largest.
pub fn column_basis<T: Real>(m: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = svd(m);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if top == T::zero() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let cut = top * T::lit(tol);
    let cols: Vec<DVector<T>> = svd.singular_values.iter().enumerate().filter(|(_, &s)| s > cut).map(|(i, _)| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::zeros(m.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Angle between a nonzero vector and the span of orthonormal columns.
pub fn angle_to_subspace<T: Real>(v: &DVector<T>, basis: &DMatrix<T>) -> T {
    if basis.ncols() == 0 {
        return T::frac_pi_2();
    }
    let coeffs = basis.transpose() * v;
    let proj = basis * &coeffs;
    let perp = v - &proj;
    perp.norm().atan2(proj.norm())
}

/// Angle between two lines through the origin (sign-insensitive).
pub fn projective_angle<T: Real>(a: &DVector<T>, b: &DVector<T>) -> T {
    let na = a.norm();
    let nb = b.norm();
    if na == T::zero() || nb == T::zero() {
        return T::frac_pi_2();
    }
    let a = a / na;
    let b = b / nb;
    let dot = a.dot(&b);
    let s = if dot < T::zero() { -T::one() } else { T::one() };
    let diff = (&a - &b * s).norm();
    let sum = (&a + &b * s).norm();
    // 2 atan(|a-b|/|a+b|) is accurate for tiny angles.
    T::lit(2.0) * diff.atan2(sum)
}

/// Row-major flattening of a matrix.
pub fn vec_rows<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    DVector::from_iterator(m.nrows() * m.ncols(), (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)])))
}

/// Inverse of [`vec_rows`].
pub fn unvec_rows<T: Real>(v: &DVector<T>, rows: usize, cols: usize) -> DMatrix<T> {
    DMatrix::from_row_slice(rows, cols, v.as_slice())
}

/// Frobenius inner product.
pub fn frobenius_dot<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.component_mul(b).sum()
}

/// Lexicographically ordered `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // Rightmost index that can still advance.
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Determinant of the submatrix picked by `rows` x `cols`.
pub fn minor<T: Real>(m: &DMatrix<T>, rows: &[usize], cols: &[usize]) -> T {
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
    sub.determinant()
}
