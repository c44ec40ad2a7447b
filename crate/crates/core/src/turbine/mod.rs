//! Nonlinear NREL 5 MW plant: parameters, aerodynamic surface and drive-train dynamics.

mod params;
mod plant;
mod surface;

pub use params::{PerUnitBases, TurbineParams};
pub use plant::{
    derivs_1dof, derivs_3dof, derivs_4state, rotor_torque, rotor_torque_flagged,
    rotor_torque_gradient, steady_state_pitch, Inputs, PlantState1, PlantState3, PlantState4,
    TorqueGradient,
};
pub use surface::{calibrate_surface, CoefficientSurface};
