use crate::ts::ModelKind;
use crate::turbine::{derivs_1dof, derivs_3dof, CoefficientSurface, Inputs, PlantState1, PlantState3, TurbineParams};
use crate::{Error, Result};

/// Exact zero-order-hold update of the first-order lag `ż = (v - z) / τ`.
pub fn premise_filter(v: f64, z_prev: f64, dt: f64, tau: f64) -> f64 {
    z_prev + (1.0 - (-dt / tau).exp()) * (v - z_prev)
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<const N: usize>(f: impl Fn(&[f64; N]) -> [f64; N], x: &[f64; N], dt: f64) -> [f64; N] {
    let shifted = |k: &[f64; N], h: f64| core::array::from_fn(|i| x[i] + h * k[i]);
    let k1 = f(x);
    let k2 = f(&shifted(&k1, 0.5 * dt));
    let k3 = f(&shifted(&k2, 0.5 * dt));
    let k4 = f(&shifted(&k3, dt));
    core::array::from_fn(|i| x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Actuator constraints; `None` disables a limit.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ActuatorLimits {
    /// rad/s
    pub pitch_rate: Option<f64>,
    /// rad
    pub pitch_min: Option<f64>,
    /// N·m/s
    pub torque_rate: Option<f64>,
    /// N·m
    pub torque_max: Option<f64>,
}

impl Default for ActuatorLimits {
    fn default() -> Self {
        Self::from_params(&TurbineParams::default())
    }
}

impl ActuatorLimits {
    pub fn from_params(params: &TurbineParams) -> Self {
        Self {
            pitch_rate: Some(params.max_pitch_rate),
            pitch_min: Some(0.0),
            torque_rate: Some(params.max_torque_rate),
            torque_max: Some(params.max_generator_torque),
        }
    }

    pub fn none() -> Self {
        Self { pitch_rate: None, pitch_min: None, torque_rate: None, torque_max: None }
    }

    pub fn without_torque_limits(self) -> Self {
        Self { torque_rate: None, torque_max: None, ..self }
    }

    /// Applies slew and magnitude limits to a command, given the value held
    /// over the previous step.
    pub fn apply(&self, held: Inputs, command: Inputs, dt: f64) -> Inputs {
        let slew = |prev: f64, cmd: f64, rate: Option<f64>| match rate {
            Some(r) => prev + (cmd - prev).clamp(-r * dt, r * dt),
            None => cmd,
        };
        let mut pitch = slew(held.pitch, command.pitch, self.pitch_rate);
        if let Some(lo) = self.pitch_min {
            pitch = pitch.max(lo);
        }
        let mut torque = slew(held.generator_torque, command.generator_torque, self.torque_rate);
        if let Some(hi) = self.torque_max {
            torque = torque.clamp(-hi, hi);
        }
        Inputs { pitch, generator_torque: torque }
    }

    pub fn describe(&self) -> alloc::string::String {
        let on = |o: Option<f64>| if o.is_some() { "on" } else { "off" };
        alloc::format!(
            "pitch_rate:{};pitch_min:{};torque_rate:{};torque_max:{}",
            on(self.pitch_rate),
            on(self.pitch_min),
            on(self.torque_rate),
            on(self.torque_max)
        )
    }
}

/// Nonlinear plant on the common state `[ω_r, ω_g, Δθ, T_g]`. Models without
/// a torque lag hold `T_g` at the demand; the rigid model keeps `ω_g = n ω_r`.
#[derive(Debug, Clone, Copy)]
pub struct Plant<'a> {
    pub kind: ModelKind,
    pub params: &'a TurbineParams,
    pub surface: &'a CoefficientSurface,
    tau: f64,
}

impl<'a> Plant<'a> {
    pub fn new(kind: ModelKind, params: &'a TurbineParams, surface: &'a CoefficientSurface) -> Result<Self> {
        let tau = params.torque_actuator_tau;
        if !(tau > 0.0) {
            return Err(Error::InvalidParameter {
                name: "torque_actuator_tau",
                reason: alloc::format!("must be positive, got {tau}"),
            });
        }
        Ok(Self { kind, params, surface, tau })
    }

    /// Puts the state on the model's constraint manifold for the held inputs.
    pub fn project(&self, x: &mut [f64; 4], u: Inputs) {
        match self.kind {
            ModelKind::FourState => {}
            ModelKind::ThreeDof => x[3] = u.generator_torque,
            ModelKind::OneDof => {
                x[1] = self.params.gear_ratio * x[0];
                x[3] = u.generator_torque;
            }
        }
    }

    pub fn derivs(&self, x: &[f64; 4], u: Inputs, v: f64) -> [f64; 4] {
        match self.kind {
            ModelKind::OneDof => {
                let inputs = Inputs { pitch: u.pitch, generator_torque: x[3] };
                let d = derivs_1dof(PlantState1 { rotor_speed: x[0] }, inputs, v, self.surface, self.params);
                [d, self.params.gear_ratio * d, 0.0, 0.0]
            }
            ModelKind::ThreeDof | ModelKind::FourState => {
                let inputs = Inputs { pitch: u.pitch, generator_torque: x[3] };
                let d = derivs_3dof(PlantState3::from_array([x[0], x[1], x[2]]), inputs, v, self.surface, self.params);
                let lag = if self.kind == ModelKind::FourState { (u.generator_torque - x[3]) / self.tau } else { 0.0 };
                [d.rotor_speed, d.generator_speed, d.torsion, lag]
            }
        }
    }

    /// RK4 step with inputs and wind held over `dt`.
    pub fn step(&self, x: &[f64; 4], u: Inputs, v: f64, dt: f64, t: f64) -> Result<[f64; 4]> {
        let mut start = *x;
        self.project(&mut start, u);
        let next = rk4_step(|s| self.derivs(s, u, v), &start, dt);
        if next.iter().all(|s| s.is_finite()) {
            Ok(next)
        } else {
            Err(Error::NonFiniteState { t: t + dt })
        }
    }
}
