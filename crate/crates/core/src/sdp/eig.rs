use crate::linalg::{eig_extremes, is_symmetric, Mat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenExtremes {
    pub min: f64,
    pub max: f64,
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eig_margin(block: &Mat) -> Result<EigenExtremes> {
    if block.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteMatrix);
    }
    if !is_symmetric(block, 1e-12) {
        return Err(Error::NotSymmetric { block: 0 });
    }
    let (min, max) = eig_extremes(block)?;
    Ok(EigenExtremes { min, max })
}
