
use super::{CoefficientSurface, TurbineParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantState1 {
    pub rotor_speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantState3 {
    pub rotor_speed: f64,
    pub generator_speed: f64,
    pub torsion: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantState4 {
    pub rotor_speed: f64,
    pub generator_speed: f64,
    pub torsion: f64,
    pub generator_torque: f64,
}

impl PlantState4 {
    pub fn to_array(self) -> [f64; 4] {
        [self.rotor_speed, self.generator_speed, self.torsion, self.generator_torque]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self { rotor_speed: x[0], generator_speed: x[1], torsion: x[2], generator_torque: x[3] }
    }

    pub fn drive_train(self) -> PlantState3 {
        PlantState3 {
            rotor_speed: self.rotor_speed,
            generator_speed: self.generator_speed,
            torsion: self.torsion,
        }
    }
}

impl PlantState3 {
    pub fn to_array(self) -> [f64; 3] {
        [self.rotor_speed, self.generator_speed, self.torsion]
    }

    pub fn from_array(x: [f64; 3]) -> Self {
        Self { rotor_speed: x[0], generator_speed: x[1], torsion: x[2] }
    }
}

/// Pitch angle (rad) and generator torque (N·m). For the 4-state model the
/// torque is the actuator demand.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Inputs {
    pub pitch: f64,
    pub generator_torque: f64,
}

/// Aerodynamic rotor torque and a flag set when `ω_r ≤ 0` forced the standstill limit.
pub fn rotor_torque_flagged(
    v: f64,
    rotor_speed: f64,
    pitch: f64,
    surface: &CoefficientSurface,
    params: &TurbineParams,
) -> (f64, bool) {
    if v <= 0.0 {
        return (0.0, false);
    }
    if rotor_speed <= 0.0 {
        return (0.0, true);
    }
    let r = params.rotor_radius;
    let lambda = rotor_speed * r / v;
    let torque = 0.5 * params.air_density * core::f64::consts::PI * r.powi(3) * v * v
        * surface.cq(lambda, pitch);
    (torque, false)
}

pub fn rotor_torque(
    v: f64,
    rotor_speed: f64,
    pitch: f64,
    surface: &CoefficientSurface,
    params: &TurbineParams,
) -> f64 {
    rotor_torque_flagged(v, rotor_speed, pitch, surface, params).0
}

/// Closed-form partial derivatives of the rotor torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueGradient {
    pub rotor_speed: f64,
    pub pitch: f64,
    pub wind: f64,
}

pub fn rotor_torque_gradient(
    v: f64,
    rotor_speed: f64,
    pitch: f64,
    surface: &CoefficientSurface,
    params: &TurbineParams,
) -> TorqueGradient {
    let r = params.rotor_radius;
    let k = 0.5 * params.air_density * core::f64::consts::PI * r.powi(3);
    let lambda = rotor_speed * r / v;
    let (cp, cp_l, cp_b) = surface.cp_with_partials(lambda, pitch);
    // T = k v² c_P / λ
    let dt_dlambda = k * v * v * (cp_l * lambda - cp) / (lambda * lambda);
    TorqueGradient {
        rotor_speed: dt_dlambda * r / v,
        pitch: k * v * v * cp_b / lambda,
        wind: 2.0 * k * v * cp / lambda - dt_dlambda * lambda / v,
    }
}

pub fn derivs_1dof(
    x: PlantState1,
    u: Inputs,
    v: f64,
    surface: &CoefficientSurface,
    params: &TurbineParams,
) -> f64 {
    let tr = rotor_torque(v, x.rotor_speed, u.pitch, surface, params);
    (tr - u.generator_torque * params.gear_ratio) / params.rigid_inertia()
}

pub fn derivs_3dof(
    x: PlantState3,
    u: Inputs,
    v: f64,
    surface: &CoefficientSurface,
    params: &TurbineParams,
) -> PlantState3 {
    let n = params.gear_ratio;
    let (ks, ds) = (params.shaft_stiffness, params.shaft_damping);
    let tr = rotor_torque(v, x.rotor_speed, u.pitch, surface, params);
    let shaft = ds * n * n * x.rotor_speed - ds * n * x.generator_speed + ks * n * n * x.torsion;
    PlantState3 {
        rotor_speed: (tr - shaft) / params.inertia_rotor,
        generator_speed: (shaft / n - u.generator_torque) / params.inertia_generator,
        torsion: x.rotor_speed - x.generator_speed / n,
    }
}

pub fn derivs_4state(
    x: PlantState4,
    u: Inputs,
    v: f64,
    tau_act: f64,
    surface: &CoefficientSurface,
    params: &TurbineParams,
) -> Result<PlantState4> {
    if !(tau_act > 0.0) {
        return Err(Error::InvalidParameter {
            name: "torque_actuator_tau",
            reason: alloc::format!("must be positive, got {tau_act}"),
        });
    }
    let inner = Inputs { pitch: u.pitch, generator_torque: x.generator_torque };
    let d = derivs_3dof(x.drive_train(), inner, v, surface, params);
    Ok(PlantState4 {
        rotor_speed: d.rotor_speed,
        generator_speed: d.generator_speed,
        torsion: d.torsion,
        generator_torque: (u.generator_torque - x.generator_torque) / tau_act,
    })
}

/// Pitch on the feathering branch at which the rotor delivers rated torque at rated speed.
pub fn steady_state_pitch(v: f64, params: &TurbineParams, surface: &CoefficientSurface) -> Result<f64> {
    let target = params.rated_generator_torque * params.gear_ratio;
    let excess = |b: f64| rotor_torque(v, params.rated_rotor_speed, b, surface, params) - target;
    let top = 45.0_f64.to_radians();
    let steps = 1800;
    let h = top / steps as f64;
    let mut hi = top;
    if excess(hi) >= 0.0 {
        return Err(Error::NoPitchRoot { v });
    }
    for k in (0..steps).rev() {
        let lo = k as f64 * h;
        if excess(lo) >= 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if excess(mid) >= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        hi = lo;
    }
    Err(Error::NoPitchRoot { v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turbine::calibrate_surface;
    use proptest::prelude::*;

    fn setup() -> (TurbineParams, CoefficientSurface) {
        let p = TurbineParams::default();
        let s = calibrate_surface(&p).unwrap();
        (p, s)
    }

    fn equilibrium(p: &TurbineParams) -> PlantState4 {
        PlantState4 {
            rotor_speed: p.rated_rotor_speed,
            generator_speed: p.rated_rotor_speed * p.gear_ratio,
            torsion: p.rated_torsion(),
            generator_torque: p.rated_generator_torque,
        }
    }

    #[test]
    fn zero_wind_gives_zero_torque() {
        let (p, s) = setup();
        assert_eq!(rotor_torque(0.0, 1.0, 0.1, &s, &p), 0.0);
    }

    #[test]
    fn standstill_is_flagged() {
        let (p, s) = setup();
        assert_eq!(rotor_torque_flagged(12.0, 0.0, 0.0, &s, &p), (0.0, true));
    }

    #[test]
    fn rated_torque_at_rated_wind() {
        let (p, s) = setup();
        let oracle = p.rated_mechanical_power / p.rated_rotor_speed;
        let t = rotor_torque(11.4, p.rated_rotor_speed, 0.0, &s, &p);
        assert!((t / oracle - 1.0).abs() < 0.02, "{t} vs {oracle}");
        let t12 = rotor_torque(12.0, p.rated_rotor_speed, 0.0, &s, &p);
        assert!(t12 > t);
    }

    #[test]
    fn rigid_rated_point_is_near_equilibrium() {
        let (p, s) = setup();
        let u = Inputs { pitch: 0.0, generator_torque: p.rated_generator_torque };
        let d = derivs_1dof(PlantState1 { rotor_speed: p.rated_rotor_speed }, u, 11.4, &s, &p);
        assert!(d.abs() < 1e-3);
        let free = Inputs { pitch: 0.0, generator_torque: 0.0 };
        let d0 = derivs_1dof(PlantState1 { rotor_speed: p.rated_rotor_speed }, free, 11.4, &s, &p);
        let tr = rotor_torque(11.4, p.rated_rotor_speed, 0.0, &s, &p);
        assert!((d0 - tr / p.rigid_inertia()).abs() < 1e-12);
        assert!((d0 - 4.18e6 / p.rigid_inertia()).abs() / d0 < 0.02);
    }

    #[test]
    fn torsional_equilibrium() {
        let (p, s) = setup();
        let v = 16.0;
        let beta = steady_state_pitch(v, &p, &s).unwrap();
        let x = equilibrium(&p);
        let u = Inputs { pitch: beta, generator_torque: p.rated_generator_torque };
        let d = derivs_3dof(x.drive_train(), u, v, &s, &p);
        assert!(d.torsion.abs() < 1e-12);
        assert!(d.generator_speed.abs() < 1e-9);
        assert!(d.rotor_speed.abs() < 1e-9);
        let d4 = derivs_4state(x, u, v, 0.3, &s, &p).unwrap();
        assert_eq!(d4.generator_torque, 0.0);
    }

    #[test]
    fn rest_state_is_stationary() {
        let (p, s) = setup();
        let d = derivs_3dof(PlantState3::default(), Inputs::default(), 0.0, &s, &p);
        assert_eq!(d, PlantState3::default());
    }

    #[test]
    fn torsion_perturbation_signs() {
        let (p, s) = setup();
        let v = 16.0;
        let beta = steady_state_pitch(v, &p, &s).unwrap();
        let x = equilibrium(&p).drive_train();
        let u = Inputs { pitch: beta, generator_torque: p.rated_generator_torque };
        let base = derivs_3dof(x, u, v, &s, &p);
        let moved = derivs_3dof(PlantState3 { torsion: x.torsion + 0.01, ..x }, u, v, &s, &p);
        assert!(moved.rotor_speed < base.rotor_speed);
        assert!(moved.generator_speed > base.generator_speed);
    }

    #[test]
    fn actuator_lag() {
        let (p, s) = setup();
        let x = PlantState4 { generator_torque: 0.0, ..equilibrium(&p) };
        let u = Inputs { pitch: 0.1, generator_torque: p.rated_generator_torque };
        let d = derivs_4state(x, u, 16.0, 0.3, &s, &p).unwrap();
        assert!((d.generator_torque / p.rated_generator_torque - 1.0 / 0.3).abs() < 1e-12);
        assert!(derivs_4state(x, u, 16.0, 0.0, &s, &p).is_err());
    }

    #[test]
    fn pitch_schedule() {
        let (p, s) = setup();
        assert!(steady_state_pitch(11.4, &p, &s).unwrap().to_degrees() < 0.5);
        let b16 = steady_state_pitch(16.0, &p, &s).unwrap();
        assert!(steady_state_pitch(25.0, &p, &s).unwrap() > b16);
        let mut last = 0.0;
        for v in 12..=24 {
            let b = steady_state_pitch(v as f64, &p, &s).unwrap();
            assert!(b >= last);
            last = b;
        }
        assert!(matches!(steady_state_pitch(8.0, &p, &s), Err(Error::NoPitchRoot { .. })));
    }

    proptest! {
        #[test]
        fn power_identity(v in 4.0..25.0f64, w in 0.5..1.6f64, b in 0.0..0.5f64) {
            let (p, s) = setup();
            let lambda = w * p.rotor_radius / v;
            let tr = rotor_torque(v, w, b, &s, &p);
            let aero = 0.5 * p.air_density * core::f64::consts::PI * p.rotor_radius.powi(2)
                * v.powi(3) * s.cp(lambda, b);
            prop_assert!((tr * w - aero).abs() <= 1e-9 * aero.abs().max(1.0));
        }

        #[test]
        fn stiff_shaft_reduces_to_rigid(w in 0.9..1.5f64, tg in 0.0..47000.0f64, v in 12.0..24.0f64, b in 0.0..0.4f64) {
            let (p, s) = setup();
            let n = p.gear_ratio;
            let x = PlantState3 { rotor_speed: w, generator_speed: n * w, torsion: 0.004 };
            let u = Inputs { pitch: b, generator_torque: tg };
            let d = derivs_3dof(x, u, v, &s, &p);
            // momentum balance of the rigidly coupled masses
            let rigid = (p.inertia_rotor * d.rotor_speed + n * p.inertia_generator * d.generator_speed)
                / p.rigid_inertia();
            let one = derivs_1dof(PlantState1 { rotor_speed: w }, u, v, &s, &p);
            prop_assert!((rigid - one).abs() <= 1e-6 * one.abs().max(1e-9));
        }
    }
}
