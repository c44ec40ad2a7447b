use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// How the configured angle `θ` maps onto the damping sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ConeConvention {
    /// Admissible poles satisfy `|arg(-λ)| ≤ θ`.
    #[default]
    HalfAngle,
    /// `θ` is measured from the imaginary axis: `|arg(-λ)| ≤ π/2 - θ`.
    Complement,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SynthesisSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub theta: f64,
    pub gamma: f64,
    /// Enforce `gamma` as given instead of minimising it.
    pub fixed_gamma: bool,
    /// Reference-model time constants, one per tracked output.
    pub taus: Vec<f64>,
    pub cone: ConeConvention,
}

impl Default for SynthesisSpec {
    fn default() -> Self {
        Self::torque()
    }
}

impl SynthesisSpec {
    /// Rotor-speed loop on the rigid drive train.
    pub fn speed() -> Self {
        Self {
            alpha_min: 0.1,
            alpha_max: 1.0,
            theta: 1.51,
            gamma: 3.0,
            fixed_gamma: true,
            taus: alloc::vec![10.0],
            cone: ConeConvention::HalfAngle,
        }
    }

    /// Torque loop on the 4-state model.
    pub fn torque() -> Self {
        Self {
            alpha_min: 0.2,
            alpha_max: 2.0,
            theta: 1.51,
            gamma: 1.5,
            fixed_gamma: true,
            taus: alloc::vec![4.0, 0.3],
            cone: ConeConvention::HalfAngle,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.alpha_min > 0.0 && self.alpha_min < self.alpha_max && self.alpha_max.is_finite()) {
            return bad("alpha", alloc::format!("need 0 < {} < {}", self.alpha_min, self.alpha_max));
        }
        if !(self.theta > 0.0 && self.theta < core::f64::consts::FRAC_PI_2) {
            return bad("theta", alloc::format!("{} outside (0, pi/2)", self.theta));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad("gamma", alloc::format!("{} is not positive", self.gamma));
        }
        if self.taus.is_empty() || self.taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return bad("taus", alloc::format!("{:?} must be positive", self.taus));
        }
        Ok(())
    }

    pub fn region(&self) -> DRegion {
        let half_angle = match self.cone {
            ConeConvention::HalfAngle => self.theta,
            ConeConvention::Complement => core::f64::consts::FRAC_PI_2 - self.theta,
        };
        DRegion { alpha_min: self.alpha_min, alpha_max: self.alpha_max, half_angle }
    }

    pub fn summary(&self) -> String {
        alloc::format!(
            "alpha=[{}, {}], theta={}, gamma={}{}, taus={:?}",
            self.alpha_min,
            self.alpha_max,
            self.theta,
            self.gamma,
            if self.fixed_gamma { " (fixed)" } else { " (minimised)" },
            self.taus
        )
    }
}

/// Vertical strip intersected with a sector around the negative real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DRegion {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Sector half-angle measured from the negative real axis.
    pub half_angle: f64,
}

impl DRegion {
    /// Smallest region containing both.
    pub fn union(&self, other: &DRegion) -> DRegion {
        DRegion {
            alpha_min: self.alpha_min.min(other.alpha_min),
            alpha_max: self.alpha_max.max(other.alpha_max),
            half_angle: self.half_angle.max(other.half_angle),
        }
    }

    /// `None` when inside, otherwise the name of the violated bound.
    pub fn violation(&self, z: Complex64, tol: f64) -> Option<&'static str> {
        if z.re > -self.alpha_min + tol {
            Some("decay-min")
        } else if z.re < -self.alpha_max - tol {
            Some("decay-max")
        } else if z.im.abs() > self.half_angle.tan() * z.re.abs() + tol {
            Some("cone")
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SynthesisSpec::speed().validate().unwrap();
        SynthesisSpec::torque().validate().unwrap();
    }

    #[test]
    fn rejects_inverted_strip() {
        let s = SynthesisSpec { alpha_min: 3.0, ..SynthesisSpec::torque() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn region_checks() {
        let r = SynthesisSpec::torque().region();
        assert_eq!(r.violation(Complex64::new(-1.0, 0.0), 1e-6), None);
        assert_eq!(r.violation(Complex64::new(-0.1, 0.0), 1e-6), Some("decay-min"));
        assert_eq!(r.violation(Complex64::new(-3.0, 0.0), 1e-6), Some("decay-max"));
        assert_eq!(r.violation(Complex64::new(-1.0, 20.0), 1e-6), Some("cone"));
        let c = SynthesisSpec { cone: ConeConvention::Complement, ..SynthesisSpec::torque() }.region();
        assert_eq!(c.violation(Complex64::new(-1.0, 0.1), 1e-6), Some("cone"));
        let u = SynthesisSpec::speed().region().union(&r);
        assert_eq!((u.alpha_min, u.alpha_max), (0.1, 2.0));
    }
}
