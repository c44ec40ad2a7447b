use alloc::format;
use core::f64::consts::PI;

use crate::{Error, Result};

const RPM: f64 = 2.0 * PI / 60.0;

/// Turbine constants. Angles in rad, speeds in rad/s, torques in N·m.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TurbineParams {
    pub rated_electrical_power: f64,
    pub generator_efficiency: f64,
    pub rated_generator_torque: f64,
    pub rated_generator_speed: f64,
    pub rated_mechanical_power: f64,
    pub v_cut_in: f64,
    pub v_rated: f64,
    pub v_cut_out: f64,
    pub rated_rotor_speed: f64,
    pub gear_ratio: f64,
    pub rotor_radius: f64,
    pub inertia_rotor: f64,
    pub inertia_generator: f64,
    /// Referred to the generator side; enters the rotor equation scaled by `gear_ratio²`.
    pub shaft_stiffness: f64,
    pub shaft_damping: f64,
    pub max_generator_torque: f64,
    pub max_torque_rate: f64,
    pub max_pitch_rate: f64,
    pub cp_opt: f64,
    pub lambda_opt: f64,
    pub air_density: f64,
    /// Generator torque actuator time constant, s.
    pub torque_actuator_tau: f64,
}

impl Default for TurbineParams {
    fn default() -> Self {
        Self {
            rated_electrical_power: 5.0e6,
            generator_efficiency: 0.944,
            rated_generator_torque: 43093.55,
            rated_generator_speed: 1173.7 * RPM,
            rated_mechanical_power: 5.297e6,
            v_cut_in: 3.0,
            v_rated: 11.4,
            v_cut_out: 25.0,
            rated_rotor_speed: 12.1 * RPM,
            gear_ratio: 97.0,
            rotor_radius: 63.0,
            inertia_rotor: 38_759_227.0,
            inertia_generator: 534.1,
            shaft_stiffness: 92_214.0,
            shaft_damping: 660.54,
            max_generator_torque: 47402.91,
            max_torque_rate: 15000.0,
            max_pitch_rate: 8.0 * PI / 180.0,
            cp_opt: 0.482,
            lambda_opt: 7.55,
            air_density: 1.225,
            torque_actuator_tau: 0.3,
        }
    }
}

impl TurbineParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("inertia_rotor", self.inertia_rotor),
            ("inertia_generator", self.inertia_generator),
            ("shaft_stiffness", self.shaft_stiffness),
            ("shaft_damping", self.shaft_damping),
            ("rotor_radius", self.rotor_radius),
            ("gear_ratio", self.gear_ratio),
            ("air_density", self.air_density),
            ("rated_rotor_speed", self.rated_rotor_speed),
            ("rated_generator_torque", self.rated_generator_torque),
            ("torque_actuator_tau", self.torque_actuator_tau),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {value}"),
                });
            }
        }
        let shaft_power = self.rated_generator_torque * self.rated_generator_speed;
        if (shaft_power / self.rated_mechanical_power - 1.0).abs() > 5e-3 {
            return Err(Error::InvalidParameter {
                name: "rated_mechanical_power",
                reason: format!(
                    "rated torque x rated speed = {shaft_power:.0} W differs by more than 0.5 %"
                ),
            });
        }
        if !(self.v_cut_in < self.v_rated && self.v_rated < self.v_cut_out) {
            return Err(Error::InvalidParameter {
                name: "v_rated",
                reason: "wind speeds must satisfy cut-in < rated < cut-out".into(),
            });
        }
        Ok(())
    }

    /// Combined inertia of the rigid drive train seen from the rotor.
    pub fn rigid_inertia(&self) -> f64 {
        self.inertia_rotor + self.gear_ratio * self.gear_ratio * self.inertia_generator
    }

    /// Shaft torsion at which the spring carries rated generator torque.
    pub fn rated_torsion(&self) -> f64 {
        self.rated_generator_torque / (self.shaft_stiffness * self.gear_ratio)
    }

    pub fn bases(&self) -> PerUnitBases {
        PerUnitBases {
            rotor_speed: self.rated_rotor_speed,
            generator_speed: self.rated_rotor_speed * self.gear_ratio,
            torsion: self.rated_torsion(),
            generator_torque: self.rated_generator_torque,
            pitch: 1.0,
        }
    }
}

/// Scale factors between SI and per-unit quantities (`si = pu * base`).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PerUnitBases {
    pub rotor_speed: f64,
    pub generator_speed: f64,
    pub torsion: f64,
    pub generator_torque: f64,
    pub pitch: f64,
}

impl PerUnitBases {
    /// Bases of the four drive-train states `[ω_r, ω_g, Δθ, T_g]`.
    pub fn state4(&self) -> [f64; 4] {
        [self.rotor_speed, self.generator_speed, self.torsion, self.generator_torque]
    }

    /// Bases of the inputs `[β, T_g(,d)]`.
    pub fn inputs(&self) -> [f64; 2] {
        [self.pitch, self.generator_torque]
    }
}
