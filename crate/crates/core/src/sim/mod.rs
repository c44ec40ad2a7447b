//! Closed-loop nonlinear simulation under the PDC controller.

mod control;
mod integrate;
mod scenario;
mod wind;

pub use control::{Controller, ControllerState};
pub use integrate::{premise_filter, rk4_step, ActuatorLimits, Plant};
pub use scenario::{
    run_scenario, simulate, Scenario, ScenarioPlan, SimConfig, SimContext, SimTrace, TraceSample,
};
pub use wind::{wind_turbulent, Eog, WindField, WindSpec};
