use alloc::vec::Vec;

use nalgebra::{Matrix2, Vector2};

use crate::mrc::GainSchedule;
use crate::ts::{MembershipGrid, OperatingPoint};
use crate::turbine::{Inputs, PerUnitBases};
use crate::{Error, Result};

/// Controller states alongside the plant: reference model and error integrators, in p.u.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    pub reference: [f64; 2],
    pub integrator: [f64; 2],
}

/// PDC law `u = -Σ h_j(z) K_j x̄` around the membership-blended operating point.
#[derive(Debug, Clone)]
pub struct Controller {
    schedule: GainSchedule,
    grid: MembershipGrid,
    points: Vec<OperatingPoint>,
    bases: PerUnitBases,
}

impl Controller {
    pub fn new(schedule: GainSchedule, points: &[OperatingPoint], bases: PerUnitBases) -> Result<Self> {
        let grid = MembershipGrid::from_points(points)?;
        if schedule.nodes.len() != points.len()
            || schedule.nodes.iter().zip(grid.nodes()).any(|(a, b)| (a - b).abs() > 1e-9)
        {
            return Err(Error::GridMismatch);
        }
        if let Some(k) = schedule.gains.iter().find(|k| k.shape() != (2, 8)) {
            return Err(Error::Dimension(alloc::format!("simulation needs 2x8 gains, got {:?}", k.shape())));
        }
        Ok(Self { schedule, grid, points: points.to_vec(), bases })
    }

    pub fn schedule(&self) -> &GainSchedule {
        &self.schedule
    }

    pub fn bases(&self) -> &PerUnitBases {
        &self.bases
    }

    pub fn weights(&self, z: f64) -> Vec<f64> {
        self.grid.weights(z)
    }

    /// Blended operating state and inputs.
    pub fn operating_point(&self, h: &[f64]) -> ([f64; 4], Inputs) {
        let mut state = [0.0; 4];
        let mut u = Inputs::default();
        for (p, w) in self.points.iter().zip(h) {
            for (s, x) in state.iter_mut().zip(&p.state) {
                *s += w * x;
            }
            u.pitch += w * p.pitch;
            u.generator_torque += w * p.generator_torque;
        }
        (state, u)
    }

    /// Per-unit augmented deviation `[Δx; x^r - 1; x_I]`.
    pub fn deviation(&self, h: &[f64], plant: &[f64; 4], ctrl: &ControllerState) -> [f64; 8] {
        let (x0, _) = self.operating_point(h);
        let base = self.bases.state4();
        let mut xb = [0.0; 8];
        for i in 0..4 {
            xb[i] = (plant[i] - x0[i]) / base[i];
        }
        xb[4] = ctrl.reference[0] - 1.0;
        xb[5] = ctrl.reference[1] - 1.0;
        xb[6] = ctrl.integrator[0];
        xb[7] = ctrl.integrator[1];
        xb
    }

    /// Absolute pitch and torque demands.
    pub fn command(&self, z: f64, plant: &[f64; 4], ctrl: &ControllerState) -> Inputs {
        let h = self.weights(z);
        let k = self.schedule.blend(&h);
        let xb = self.deviation(&h, plant, ctrl);
        let (_, u0) = self.operating_point(&h);
        let du: [f64; 2] = core::array::from_fn(|r| -(0..8).map(|c| k[(r, c)] * xb[c]).sum::<f64>());
        Inputs {
            pitch: u0.pitch + du[0] * self.bases.pitch,
            generator_torque: u0.generator_torque + du[1] * self.bases.generator_torque,
        }
    }

    /// Integrator values for which the command equals `target` at the given
    /// plant and reference state; zero when the integrator gain block is singular.
    pub fn integrator_for(&self, z: f64, plant: &[f64; 4], reference: [f64; 2], target: Inputs) -> [f64; 2] {
        let h = self.weights(z);
        let k = self.schedule.blend(&h);
        let ctrl = ControllerState { reference, integrator: [0.0; 2] };
        let open = self.command(z, plant, &ctrl);
        let want = Vector2::new(
            (target.pitch - open.pitch) / self.bases.pitch,
            (target.generator_torque - open.generator_torque) / self.bases.generator_torque,
        );
        let ki = Matrix2::new(k[(0, 6)], k[(0, 7)], k[(1, 6)], k[(1, 7)]);
        match ki.try_inverse() {
            Some(inv) => {
                let x = -(inv * want);
                [x[0], x[1]]
            }
            None => [0.0; 2],
        }
    }
}
