//! Analytic power-coefficient surface and its calibration.
//!
//! `c_P(λ, β) = c1 (c2 u - c3 β - c4) exp(-c5 u) + c6 λ` with
//! `u = 1 / (λ + k1 β) - k2 / (1 + β³)` and β in degrees. Negative values are
//! clamped to zero. Below `λ = 0.1` the surface decays quadratically so that
//! `c_Q = c_P / λ` vanishes at standstill.

use nalgebra::{Matrix3, Vector3};

use super::TurbineParams;
use crate::{Error, Result};

const LAMBDA_FLOOR: f64 = 0.1;
const RAD_TO_DEG: f64 = 180.0 / core::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoefficientSurface {
    pub c: [f64; 6],
    pub pitch_shift: f64,
    pub stall_shift: f64,
}

impl CoefficientSurface {
    /// Shape constants held fixed during calibration; `c1`, `c2`, `c5` are placeholders.
    pub const fn uncalibrated() -> Self {
        Self {
            c: [7.0, 50.0, 0.2, 5.0, 25.0, 0.0068],
            pitch_shift: 0.08,
            stall_shift: 0.0,
        }
    }

    /// Unclamped surface value and partials `(c_P, ∂/∂λ, ∂/∂β_deg)`.
    fn raw(&self, lambda: f64, beta_deg: f64) -> (f64, f64, f64) {
        let [c1, c2, c3, c4, c5, c6] = self.c;
        let shifted = lambda + self.pitch_shift * beta_deg;
        let cube = 1.0 + beta_deg * beta_deg * beta_deg;
        let u = 1.0 / shifted - self.stall_shift / cube;
        let du_dl = -1.0 / (shifted * shifted);
        let du_db = -self.pitch_shift / (shifted * shifted)
            + 3.0 * self.stall_shift * beta_deg * beta_deg / (cube * cube);
        let decay = (-c5 * u).exp();
        let lin = c2 * u - c3 * beta_deg - c4;
        let value = c1 * lin * decay + c6 * lambda;
        let dg_du = c1 * decay * (c2 - c5 * lin);
        let d_lambda = dg_du * du_dl + c6;
        let d_beta = dg_du * du_db - c1 * c3 * decay;
        (value, d_lambda, d_beta)
    }

    /// `(c_P, ∂c_P/∂λ, ∂c_P/∂β)` with β in rad.
    pub fn cp_with_partials(&self, lambda: f64, beta: f64) -> (f64, f64, f64) {
        let beta_deg = beta * RAD_TO_DEG;
        if lambda < LAMBDA_FLOOR {
            let (edge, _, edge_db) = self.raw(LAMBDA_FLOOR, beta_deg);
            if edge <= 0.0 {
                return (0.0, 0.0, 0.0);
            }
            let s = (lambda.max(0.0) / LAMBDA_FLOOR).powi(2);
            let ds = 2.0 * lambda.max(0.0) / (LAMBDA_FLOOR * LAMBDA_FLOOR);
            return (edge * s, edge * ds, edge_db * s * RAD_TO_DEG);
        }
        let (value, dl, db) = self.raw(lambda, beta_deg);
        if value <= 0.0 {
            (0.0, 0.0, 0.0)
        } else {
            (value, dl, db * RAD_TO_DEG)
        }
    }

    pub fn cp(&self, lambda: f64, beta: f64) -> f64 {
        self.cp_with_partials(lambda, beta).0
    }

    /// Torque coefficient `c_P / λ`, zero at standstill.
    pub fn cq(&self, lambda: f64, beta: f64) -> f64 {
        if lambda <= 0.0 {
            0.0
        } else {
            self.cp(lambda, beta) / lambda
        }
    }

    /// Tip-speed ratio maximising `c_P(·, β)` on `[lo, hi]`, by golden-section search.
    pub fn argmax_lambda(&self, beta: f64, lo: f64, hi: f64) -> f64 {
        let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let (mut f1, mut f2) = (self.cp(x1, beta), self.cp(x2, beta));
        while b - a > 1e-10 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = self.cp(x2, beta);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = self.cp(x1, beta);
            }
        }
        0.5 * (a + b)
    }
}

/// Fits `c1`, `c2`, `c5` so that the zero-pitch curve peaks at `(lambda_opt, cp_opt)`
/// and passes through the rated operating point.
pub fn calibrate_surface(params: &TurbineParams) -> Result<CoefficientSurface> {
    params.validate()?;
    let lambda_rated = params.rated_rotor_speed * params.rotor_radius / params.v_rated;
    let swept = 0.5 * params.air_density * core::f64::consts::PI * params.rotor_radius.powi(2);
    let cp_rated = params.rated_mechanical_power / (swept * params.v_rated.powi(3));

    let residual = |s: &CoefficientSurface| -> Vector3<f64> {
        let (peak, slope, _) = s.raw(params.lambda_opt, 0.0);
        let (rated, _, _) = s.raw(lambda_rated, 0.0);
        Vector3::new(slope, peak - params.cp_opt, rated - cp_rated)
    };
    let with = |s: &CoefficientSurface, p: &Vector3<f64>| {
        let mut out = *s;
        out.c[0] = p[0];
        out.c[1] = p[1];
        out.c[4] = p[2];
        out
    };

    let mut surface = CoefficientSurface::uncalibrated();
    let mut p = Vector3::new(surface.c[0], surface.c[1], surface.c[4]);
    let mut r = residual(&surface);
    for _ in 0..100 {
        if r.norm() < 1e-14 {
            break;
        }
        let mut jac = Matrix3::zeros();
        for k in 0..3 {
            let h = 1e-7 * p[k].abs().max(1.0);
            let mut hi = p;
            let mut lo = p;
            hi[k] += h;
            lo[k] -= h;
            let col = (residual(&with(&surface, &hi)) - residual(&with(&surface, &lo))) / (2.0 * h);
            jac.set_column(k, &col);
        }
        let Some(step) = jac.lu().solve(&(-r)) else {
            return Err(Error::Calibration { residual: r.norm() });
        };
        let mut scale = 1.0;
        loop {
            let trial = p + step * scale;
            let tr = residual(&with(&surface, &trial));
            if tr.norm() < r.norm() || scale < 1e-6 {
                p = trial;
                r = tr;
                surface = with(&surface, &p);
                break;
            }
            scale *= 0.5;
        }
    }

    let peak_error = (surface.cp(params.lambda_opt, 0.0) - params.cp_opt).abs();
    let argmax = surface.argmax_lambda(0.0, 2.0, 12.0);
    if !(peak_error < 1e-3 && (argmax - params.lambda_opt).abs() < 0.1) || !r.norm().is_finite() {
        return Err(Error::Calibration { residual: peak_error.max(r.norm()) });
    }
    Ok(surface)
}
