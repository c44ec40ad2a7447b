//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;
use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type Mat = DMatrix<f64>;

pub fn sym(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

pub fn is_symmetric(m: &Mat, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(1e-300);
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > rel_tol * scale {
                return false;
            }
        }
    }
    true
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn eig_extremes(m: &Mat) -> Result<(f64, f64)> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteMatrix);
    }
    if m.nrows() == 0 {
        return Ok((f64::INFINITY, f64::NEG_INFINITY));
    }
    let eig = SymmetricEigen::new(sym(m));
    Ok((eig.eigenvalues.min(), eig.eigenvalues.max()))
}

pub fn principal(m: &Mat, idx: &[usize]) -> Mat {
    Mat::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

pub fn select_columns(m: &Mat, idx: &[usize]) -> Mat {
    Mat::from_fn(m.nrows(), idx.len(), |r, c| m[(r, idx[c])])
}

pub fn diag(values: &[f64]) -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

/// Numerical rank from singular values with a relative cutoff.
pub fn rank(m: &Mat, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * top).count()
}

pub fn controllability_matrix(a: &Mat, b: &Mat) -> Mat {
    let n = a.nrows();
    let m = b.ncols();
    let mut out = Mat::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        out.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = a * &block;
    }
    out
}

pub fn eigenvalues(a: &Mat) -> Vec<Complex64> {
    a.clone()
        .complex_eigenvalues()
        .iter()
        .map(|c| Complex64::new(c.re, c.im))
        .collect()
}

pub fn cholesky(m: &Mat) -> Option<Cholesky<f64, Dyn>> {
    Cholesky::new(m.clone())
}

pub fn inverse(m: &Mat) -> Result<Mat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::Dimension("singular matrix".into()))
}

/// `n` log-spaced points from `10^lo` to `10^hi`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    use num_traits::Float;
    match n {
        0 => Vec::new(),
        1 => alloc::vec![Float::powf(10.0, lo)],
        _ => (0..n)
            .map(|k| Float::powf(10.0, lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn controllability_of_double_integrator() {
        let a = Mat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = Mat::from_row_slice(2, 1, &[0.0, 1.0]);
        assert_eq!(rank(&controllability_matrix(&a, &b), 1e-12), 2);
        let b2 = Mat::from_row_slice(2, 1, &[1.0, 0.0]);
        assert_eq!(rank(&controllability_matrix(&a, &b2), 1e-12), 1);
    }

    #[test]
    fn logspace_endpoints() {
        let w = logspace(-3.0, 3.0, 1000);
        assert_eq!(w.len(), 1000);
        assert!((w[0] - 1e-3).abs() < 1e-15);
        assert!((w[999] - 1e3).abs() < 1e-9);
    }
}
