use alloc::string::String;
use alloc::vec::Vec;

use super::{premise_filter, ActuatorLimits, Controller, ControllerState, Plant, WindField, WindSpec};
use crate::ts::ModelKind;
use crate::turbine::{steady_state_pitch, CoefficientSurface, Inputs, TurbineParams};
use crate::{Error, Result};

/// Run-independent simulation settings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    pub model: ModelKind,
    pub dt: f64,
    /// Record every n-th integration step.
    pub sample_every: usize,
    pub premise_tau: f64,
    pub turbulence_corner_hz: f64,
    pub speed_reference_tau: f64,
    pub torque_reference_tau: f64,
    pub frt_torque_reference_tau: f64,
    /// Replaces the per-scenario default limits when set.
    pub limits: Option<ActuatorLimits>,
    pub gust_start: f64,
    pub frt_wind: f64,
    pub frt_start: f64,
    pub frt_duration: f64,
    pub frt_torque_limits: bool,
    pub simultaneous_wind: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::FourState,
            dt: 1e-3,
            sample_every: 10,
            premise_tau: 2.0,
            turbulence_corner_hz: 0.1,
            speed_reference_tau: 10.0,
            torque_reference_tau: 0.3,
            frt_torque_reference_tau: 0.025,
            limits: None,
            gust_start: 10.0,
            frt_wind: 16.0,
            frt_start: 5.0,
            frt_duration: 0.15,
            frt_torque_limits: false,
            simultaneous_wind: 16.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self, params: &TurbineParams) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.dt > 0.0 && self.dt <= params.torque_actuator_tau / 10.0) {
            return bad("dt", alloc::format!("{} must lie in (0, tau_act / 10]", self.dt));
        }
        if self.sample_every == 0 {
            return bad("sample_every", "must be at least 1".into());
        }
        let taus = [self.premise_tau, self.speed_reference_tau, self.torque_reference_tau, self.frt_torque_reference_tau];
        if taus.iter().any(|t| !(*t > 0.0)) {
            return bad("tau", alloc::format!("{taus:?} must be positive"));
        }
        Ok(())
    }
}

/// The closed-loop experiments.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Scenario {
    /// Torque-reference staircase under turbulent wind.
    Turbulent { mean: f64, intensity: f64, seed: u64 },
    /// Extreme operating gust at constant references.
    Gust { speed: f64 },
    /// Torque reference dropped to zero for the fault duration.
    Frt,
    /// Speed and torque references both lowered by 0.1 p.u.
    Simultaneous,
}

impl Scenario {
    pub fn name(&self) -> String {
        match self {
            Scenario::Turbulent { mean, .. } => alloc::format!("turbulent-{mean}"),
            Scenario::Gust { speed } => alloc::format!("gust-{speed}"),
            Scenario::Frt => "frt".into(),
            Scenario::Simultaneous => "simultaneous".into(),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Scenario::Turbulent { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn plan(&self, cfg: &SimConfig, params: &TurbineParams) -> ScenarioPlan {
        let table = ActuatorLimits::from_params(params);
        let mut plan = match self {
            Scenario::Turbulent { mean, intensity, seed } => ScenarioPlan {
                duration: 80.0,
                wind: WindSpec::Turbulent { mean: *mean, intensity: *intensity, seed: *seed },
                references: alloc::vec![
                    (0.0, [1.0, 1.0]),
                    (10.0, [1.0, 0.5]),
                    (20.0, [1.0, 0.6]),
                    (30.0, [1.0, 0.5]),
                    (40.0, [1.0, 0.4]),
                    (50.0, [1.0, 0.5]),
                    (60.0, [1.0, 1.0]),
                ],
                reference_taus: [cfg.speed_reference_tau, cfg.torque_reference_tau],
                limits: table,
            },
            Scenario::Gust { speed } => ScenarioPlan {
                duration: 70.0 + cfg.gust_start,
                wind: WindSpec::Gust { speed: *speed, start: cfg.gust_start },
                references: alloc::vec![(0.0, [1.0, 1.0])],
                reference_taus: [cfg.speed_reference_tau, cfg.torque_reference_tau],
                limits: table,
            },
            Scenario::Frt => ScenarioPlan {
                duration: cfg.frt_start + 5.0,
                wind: WindSpec::Constant { speed: cfg.frt_wind },
                references: alloc::vec![
                    (0.0, [1.0, 1.0]),
                    (cfg.frt_start, [1.0, 0.0]),
                    (cfg.frt_start + cfg.frt_duration, [1.0, 1.0]),
                ],
                reference_taus: [cfg.speed_reference_tau, cfg.frt_torque_reference_tau],
                limits: if cfg.frt_torque_limits { table } else { table.without_torque_limits() },
            },
            Scenario::Simultaneous => ScenarioPlan {
                duration: 90.0,
                wind: WindSpec::Constant { speed: cfg.simultaneous_wind },
                references: alloc::vec![(0.0, [1.0, 1.0]), (10.0, [0.9, 0.9]), (50.0, [1.0, 1.0])],
                reference_taus: [cfg.speed_reference_tau, cfg.torque_reference_tau],
                limits: table,
            },
        };
        if let Some(l) = cfg.limits {
            plan.limits = l;
        }
        plan
    }
}

/// Fully specified run: wind, piecewise-constant p.u. references and limits.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPlan {
    pub duration: f64,
    pub wind: WindSpec,
    /// `(switch time, [ω_r ref, T_g ref])`, sorted by time.
    pub references: Vec<(f64, [f64; 2])>,
    pub reference_taus: [f64; 2],
    pub limits: ActuatorLimits,
}

impl ScenarioPlan {
    pub fn reference_at(&self, t: f64) -> [f64; 2] {
        let tol = 1e-9;
        self.references.iter().take_while(|(s, _)| *s <= t + tol).last().map(|(_, w)| *w).unwrap_or([1.0, 1.0])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceSample {
    pub t: f64,
    pub v: f64,
    pub z: f64,
    pub omega_r: f64,
    pub omega_g: f64,
    pub dtheta: f64,
    pub torque: f64,
    pub pitch: f64,
    pub torque_demand: f64,
    /// rad/s
    pub omega_r_ref: f64,
    /// N·m
    pub torque_ref: f64,
    /// Reference-model outputs, p.u.
    pub reference_state: [f64; 2],
    pub integrator: [f64; 2],
    /// `y^r - y`, p.u.
    pub error: [f64; 2],
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub scenario: String,
    pub seed: Option<u64>,
    pub dt: f64,
    pub limits: String,
    pub samples: Vec<TraceSample>,
}

impl SimTrace {
    /// Sample nearest to `t`.
    pub fn at(&self, t: f64) -> &TraceSample {
        let k = self.samples.partition_point(|s| s.t < t);
        match (k.checked_sub(1).map(|j| &self.samples[j]), self.samples.get(k)) {
            (Some(a), Some(b)) => {
                if (t - a.t).abs() <= (b.t - t).abs() {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => panic!("empty trace"),
        }
    }

    pub fn window(&self, from: f64, to: f64) -> impl Iterator<Item = &TraceSample> {
        self.samples.iter().filter(move |s| s.t >= from - 1e-9 && s.t <= to + 1e-9)
    }
}

/// Plant data and controller shared by every run.
#[derive(Debug, Clone)]
pub struct SimContext {
    pub params: TurbineParams,
    pub surface: CoefficientSurface,
    pub controller: Controller,
}

pub fn run_scenario(cfg: &SimConfig, scenario: &Scenario, ctx: &SimContext) -> Result<SimTrace> {
    let plan = scenario.plan(cfg, &ctx.params);
    simulate(cfg, &plan, ctx, scenario.name(), scenario.seed())
}

/// Integrates plant, reference model and integrators together with RK4;
/// wind, references and actuator commands are held over each step.
pub fn simulate(cfg: &SimConfig, plan: &ScenarioPlan, ctx: &SimContext, name: String, seed: Option<u64>) -> Result<SimTrace> {
    cfg.validate(&ctx.params)?;
    let params = &ctx.params;
    let plant = Plant::new(cfg.model, params, &ctx.surface)?;
    let ctrl = &ctx.controller;
    let bases = *ctrl.bases();
    let wind = WindField::from_spec(&plan.wind, plan.duration, cfg.dt, cfg.turbulence_corner_hz);
    let steps = (plan.duration / cfg.dt).round() as usize;

    let v0 = wind.at(0.0);
    let mut z = v0;
    let (mut x, blended) = ctrl.operating_point(&ctrl.weights(z));
    let start_pitch = steady_state_pitch(v0, params, &ctx.surface).unwrap_or(blended.pitch);
    let mut held = Inputs { pitch: start_pitch, generator_torque: blended.generator_torque };
    let w0 = plan.reference_at(0.0);
    let mut cs = ControllerState { reference: w0, integrator: ctrl.integrator_for(z, &x, w0, held) };
    plant.project(&mut x, held);

    let eta = params.generator_efficiency;
    let sample = |t: f64, v: f64, z: f64, x: &[f64; 4], held: Inputs, cs: &ControllerState, w: [f64; 2]| {
        let y = [x[0] / bases.rotor_speed, x[3] / bases.generator_torque];
        TraceSample {
            t,
            v,
            z,
            omega_r: x[0],
            omega_g: x[1],
            dtheta: x[2],
            torque: x[3],
            pitch: held.pitch,
            torque_demand: held.generator_torque,
            omega_r_ref: w[0] * bases.rotor_speed,
            torque_ref: w[1] * bases.generator_torque,
            reference_state: cs.reference,
            integrator: cs.integrator,
            error: [cs.reference[0] - y[0], cs.reference[1] - y[1]],
            power: eta * x[3] * x[1],
        }
    };
    let mut samples = Vec::with_capacity(steps / cfg.sample_every + 2);
    samples.push(sample(0.0, v0, z, &x, held, &cs, w0));

    let [tau_w, tau_t] = plan.reference_taus;
    for k in 0..steps {
        let t = k as f64 * cfg.dt;
        let v = wind.at(t);
        let w = plan.reference_at(t);
        let command = ctrl.command(z, &x, &cs);
        held = plan.limits.apply(held, command, cfg.dt);
        plant.project(&mut x, held);

        let joint: [f64; 8] = [x[0], x[1], x[2], x[3], cs.reference[0], cs.reference[1], cs.integrator[0], cs.integrator[1]];
        let next = super::rk4_step(
            |s| {
                let xp = [s[0], s[1], s[2], s[3]];
                let d = plant.derivs(&xp, held, v);
                let y = [s[0] / bases.rotor_speed, s[3] / bases.generator_torque];
                [
                    d[0],
                    d[1],
                    d[2],
                    d[3],
                    (w[0] - s[4]) / tau_w,
                    (w[1] - s[5]) / tau_t,
                    s[4] - y[0],
                    s[5] - y[1],
                ]
            },
            &joint,
            cfg.dt,
        );
        let t_next = (k + 1) as f64 * cfg.dt;
        if !next.iter().all(|s| s.is_finite()) {
            return Err(Error::NonFiniteState { t: t_next });
        }
        x = [next[0], next[1], next[2], next[3]];
        plant.project(&mut x, held);
        cs = ControllerState { reference: [next[4], next[5]], integrator: [next[6], next[7]] };
        z = premise_filter(v, z, cfg.dt, cfg.premise_tau);

        if (k + 1) % cfg.sample_every == 0 {
            samples.push(sample(t_next, wind.at(t_next), z, &x, held, &cs, plan.reference_at(t_next)));
        }
    }
    Ok(SimTrace { scenario: name, seed, dt: cfg.dt, limits: plan.limits.describe(), samples })
}
