use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::{Error, Result};

/// Central-difference Jacobian of `f` at `at`, with per-coordinate step
/// `max(1e-6, 1e-6 |at_k|)`.
pub fn jacobian<F>(f: F, at: &[f64]) -> Result<Mat>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let rows = f(at).len();
    let mut out = Mat::zeros(rows, at.len());
    let mut probe = at.to_vec();
    for k in 0..at.len() {
        let h = (1e-6 * at[k].abs()).max(1e-6);
        probe[k] = at[k] + h;
        let hi = f(&probe);
        probe[k] = at[k] - h;
        let lo = f(&probe);
        probe[k] = at[k];
        if hi.len() != rows || lo.len() != rows {
            return Err(Error::Dimension(alloc::format!(
                "function output length changed while perturbing coordinate {k}"
            )));
        }
        for r in 0..rows {
            let d = (hi[r] - lo[r]) / (2.0 * h);
            if !d.is_finite() {
                return Err(Error::NonFinite { coordinate: k });
            }
            out[(r, k)] = d;
        }
    }
    Ok(out)
}
