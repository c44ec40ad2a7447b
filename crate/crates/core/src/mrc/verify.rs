use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{AugmentedModel, DRegion, GainSchedule};
use crate::linalg::{eigenvalues, logspace, Mat};
use crate::{Error, Result};

/// Tolerance for recognising a reference-model pole in a closed-loop spectrum.
pub const REFERENCE_POLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PairSpectrum {
    pub pair: (usize, usize),
    /// Eigenvalues matched to reference-model poles (exempt from the region).
    pub reference: Vec<Complex64>,
    /// Plant and integrator eigenvalues.
    pub shaped: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionViolation {
    pub pair: (usize, usize),
    pub eigenvalue: Complex64,
    pub bound: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EigenReport {
    pub spectra: Vec<PairSpectrum>,
    pub violations: Vec<RegionViolation>,
}

impl EigenReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every `(A_i - B_i K_j)` spectrum against the region, with the
/// reference-model poles split off first.
pub fn verify_dregion(
    aug: &[AugmentedModel],
    gains: &GainSchedule,
    region: &DRegion,
    pairs: &[(usize, usize)],
    tol: f64,
) -> EigenReport {
    let mut report = EigenReport::default();
    for &(i, j) in pairs {
        let sys = &aug[i];
        let poles: Vec<f64> = sys.reference_indices().iter().map(|&r| sys.a[(r, r)]).collect();
        let mut unmatched: Vec<Option<f64>> = poles.into_iter().map(Some).collect();
        let mut spectrum = PairSpectrum { pair: (i, j), reference: Vec::new(), shaped: Vec::new() };
        for z in eigenvalues(&sys.closed_loop(&gains.gains[j])) {
            let hit = unmatched
                .iter_mut()
                .find(|p| p.is_some_and(|p| (z - Complex64::new(p, 0.0)).norm() <= REFERENCE_POLE_TOL));
            match hit {
                Some(slot) => {
                    *slot = None;
                    spectrum.reference.push(z);
                }
                None => {
                    if let Some(bound) = region.violation(z, tol) {
                        report.violations.push(RegionViolation { pair: (i, j), eigenvalue: z, bound });
                    }
                    spectrum.shaped.push(z);
                }
            }
        }
        report.spectra.push(spectrum);
    }
    report
}

fn transfer(a: &Mat, b: &Mat, c: &Mat, d: &Mat, omega: f64) -> Result<f64> {
    let n = a.nrows();
    let g = if n == 0 {
        d.map(|v| Complex64::new(v, 0.0))
    } else {
        let mut s = a.map(|v| Complex64::new(-v, 0.0));
        for k in 0..n {
            s[(k, k)] += Complex64::new(0.0, omega);
        }
        let rhs: DMatrix<Complex64> = b.map(|v| Complex64::new(v, 0.0));
        let x = s.lu().solve(&rhs).ok_or(Error::NonFiniteMatrix)?;
        c.map(|v| Complex64::new(v, 0.0)) * x + d.map(|v| Complex64::new(v, 0.0))
    };
    Ok(g.singular_values().max())
}

/// Peak largest singular value of `C (jωI - A)⁻¹ B + D` over a log sweep of
/// `[1e-3, 1e3]` rad/s plus DC, refined by golden section around the best sample.
pub fn hinf_norm(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Result<f64> {
    if a.nrows() > 0 && eigenvalues(a).iter().any(|z| z.re >= 0.0) {
        return Err(Error::UnstableVertex(0));
    }
    let grid = logspace(-3.0, 3.0, 1000);
    let mut best = (transfer(a, b, c, d, 0.0)?, 0usize, false);
    for (k, &w) in grid.iter().enumerate() {
        let g = transfer(a, b, c, d, w)?;
        if g > best.0 {
            best = (g, k, true);
        }
    }
    if !best.2 {
        return Ok(best.0);
    }
    let k = best.1;
    let (mut lo, mut hi) = (grid[k.saturating_sub(1)].ln(), grid[(k + 1).min(grid.len() - 1)].ln());
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let f = |x: f64| transfer(a, b, c, d, x.exp());
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..60 {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(best.0.max(f1).max(f2))
}

/// H∞ norm of the reference-to-error channel at the `(i, i)` vertex.
pub fn vertex_hinf(aug: &AugmentedModel, gain: &Mat, index: usize) -> Result<f64> {
    hinf_norm(&aug.closed_loop(gain), &aug.e, &aug.c, &aug.f).map_err(|e| match e {
        Error::UnstableVertex(_) => Error::UnstableVertex(index),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mrc::{ScheduleKind, SynthesisSpec};
    use alloc::vec;

    #[test]
    fn static_gain_norm() {
        let z = Mat::zeros(0, 0);
        let n = hinf_norm(&z, &Mat::zeros(0, 1), &Mat::zeros(1, 0), &Mat::from_element(1, 1, 0.5)).unwrap();
        assert_eq!(n, 0.5);
    }

    #[test]
    fn first_order_lag_norm() {
        let a = Mat::from_element(1, 1, -2.0);
        let b = Mat::from_element(1, 1, 2.0);
        let c = Mat::from_element(1, 1, 1.0);
        let n = hinf_norm(&a, &b, &c, &Mat::zeros(1, 1)).unwrap();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resonant_peak_is_refined() {
        // lightly damped second-order system, peak 1 / (2ζ sqrt(1-ζ²))
        let zeta: f64 = 0.05;
        let a = Mat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -2.0 * zeta]);
        let b = Mat::from_row_slice(2, 1, &[0.0, 1.0]);
        let c = Mat::from_row_slice(1, 2, &[1.0, 0.0]);
        let n = hinf_norm(&a, &b, &c, &Mat::zeros(1, 1)).unwrap();
        let exact = 1.0 / (2.0 * zeta * (1.0 - zeta * zeta).sqrt());
        assert!((n - exact).abs() < 1e-9 * exact, "{n} vs {exact}");
    }

    #[test]
    fn unstable_rejected() {
        let a = Mat::from_element(1, 1, 0.5);
        let one = Mat::from_element(1, 1, 1.0);
        assert_eq!(hinf_norm(&a, &one, &one, &one), Err(Error::UnstableVertex(0)));
    }

    #[test]
    fn zero_gain_on_unstable_plant_is_flagged() {
        let reference = crate::mrc::build_reference_model(crate::mrc::ReferenceKind::SpeedOnly, &[10.0]).unwrap();
        let plant = crate::ts::PerUnitModel {
            a: Mat::from_element(1, 1, 0.3),
            b: Mat::from_element(1, 1, 1.0),
            c: Mat::from_element(1, 1, 1.0),
        };
        let aug = crate::mrc::augment(&[plant], &reference).unwrap();
        let gains = GainSchedule { kind: ScheduleKind::Speed, nodes: vec![12.0], gains: vec![Mat::zeros(1, 3)] };
        let report = verify_dregion(&aug, &gains, &SynthesisSpec::speed().region(), &[(0, 0)], 1e-6);
        assert_eq!(report.spectra[0].reference.len(), 1);
        assert!((report.spectra[0].reference[0] + 0.1).norm() < 1e-12);
        assert!(report.violations.iter().any(|v| v.eigenvalue.re > 0.0));
    }
}
