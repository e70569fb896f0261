//! Row-major JSON serialization of matrices (arrays of arrays of numbers).

use nalgebra::DMatrix;

use super::chart::ChartPoint;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn matrix_to_rows<T: Real>(m: &DMatrix<T>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_f64_lossy()).collect()).collect()
}

pub fn matrix_from_rows<T: Real>(rows: &[Vec<f64>]) -> Result<DMatrix<T>> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Descriptor("matrix has no rows".into()));
    }
    let ncols = rows[0].len();
    if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Descriptor("matrix rows are empty or ragged".into()));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Descriptor("matrix has non-finite entries".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| T::lit(rows[i][j])))
}

pub fn point_from_rows<T: Real>(rows: &[Vec<f64>]) -> Result<ChartPoint<T>> {
    ChartPoint::from_matrix(matrix_from_rows(rows)?)
}

/// Scientific notation with 17 significant digits; `inf`, `-inf` and `nan`
/// for non-finite values. Independent of locale.
pub fn format_sig17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_roundtrip_and_validation() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]];
        let m: DMatrix<f64> = matrix_from_rows(&rows).unwrap();
        assert_eq!(m[(1, 0)], 4.0);
        assert_eq!(matrix_to_rows(&m), rows);
        assert!(matrix_from_rows::<f64>(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(matrix_from_rows::<f64>(&[]).is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_sig17(1.0), "1.0000000000000000e0");
        assert_eq!(format_sig17(3f64.ln()).parse::<f64>().unwrap(), 3f64.ln());
        assert_eq!(format_sig17(f64::INFINITY), "inf");
    }
}
