use alloc::vec::Vec;

use crate::linalg::{diag, Mat};
use crate::{Error, Result};

/// Which outputs the reference model shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReferenceKind {
    /// Rotor speed only.
    SpeedOnly,
    /// Rotor speed and generator torque.
    SpeedAndTorque,
}

impl ReferenceKind {
    pub fn channels(self) -> usize {
        match self {
            ReferenceKind::SpeedOnly => 1,
            ReferenceKind::SpeedAndTorque => 2,
        }
    }
}

/// Diagonal bank of unit-gain first-order lags `ẋ^r = A^r x^r + E^r w`, `y^r = C^r x^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceModel {
    pub a: Mat,
    pub e: Mat,
    pub c: Mat,
    pub f: Mat,
    pub taus: Vec<f64>,
}

impl ReferenceModel {
    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn poles(&self) -> Vec<f64> {
        self.taus.iter().map(|t| -1.0 / t).collect()
    }
}

pub fn build_reference_model(kind: ReferenceKind, taus: &[f64]) -> Result<ReferenceModel> {
    if taus.len() != kind.channels() {
        return Err(Error::Dimension(alloc::format!(
            "{kind:?} reference needs {} time constants, got {}",
            kind.channels(),
            taus.len()
        )));
    }
    if let Some(t) = taus.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::InvalidParameter { name: "tau", reason: alloc::format!("{t} is not positive") });
    }
    let l = taus.len();
    let rates: Vec<f64> = taus.iter().map(|t| 1.0 / t).collect();
    Ok(ReferenceModel {
        a: -diag(&rates),
        e: diag(&rates),
        c: Mat::identity(l, l),
        f: Mat::zeros(l, l),
        taus: taus.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_reference() {
        let r = build_reference_model(ReferenceKind::SpeedOnly, &[10.0]).unwrap();
        assert_eq!(r.a[(0, 0)], -0.1);
        assert_eq!(r.e[(0, 0)], 0.1);
        assert_eq!(r.c[(0, 0)], 1.0);
    }

    #[test]
    fn torque_reference_poles() {
        let r = build_reference_model(ReferenceKind::SpeedAndTorque, &[4.0, 0.3]).unwrap();
        let p = r.poles();
        assert_eq!(p[0], -0.25);
        assert!((p[1] + 10.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.a[(0, 1)], 0.0);
    }

    #[test]
    fn step_reaches_63_percent_at_tau() {
        let r = build_reference_model(ReferenceKind::SpeedOnly, &[0.3]).unwrap();
        // exact solution of the scalar lag
        let y = 1.0 - (r.a[(0, 0)] * 0.3).exp();
        assert!((y - 0.632_120_558).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_time_constants() {
        assert!(build_reference_model(ReferenceKind::SpeedOnly, &[0.0]).is_err());
        assert!(build_reference_model(ReferenceKind::SpeedAndTorque, &[1.0]).is_err());
    }
}
