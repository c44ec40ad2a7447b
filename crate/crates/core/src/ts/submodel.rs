use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use super::{jacobian, OperatingPoint};
use crate::linalg::{controllability_matrix, diag, rank, Mat};
use crate::turbine::{rotor_torque, CoefficientSurface, PerUnitBases, TurbineParams};
use crate::{Error, Result};

/// Which nonlinear plant a submodel family linearizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ModelKind {
    /// Rigid drive train, state `[ω_r]`.
    OneDof,
    /// Two-mass drive train, state `[ω_r, ω_g, Δθ]`.
    ThreeDof,
    /// Two-mass drive train with torque actuator lag, state `[ω_r, ω_g, Δθ, T_g]`.
    FourState,
}

impl ModelKind {
    pub fn states(self) -> usize {
        match self {
            ModelKind::OneDof => 1,
            ModelKind::ThreeDof => 3,
            ModelKind::FourState => 4,
        }
    }

    pub fn outputs(self) -> usize {
        match self {
            ModelKind::OneDof => 1,
            _ => 2,
        }
    }

    pub fn state_bases(self, bases: &PerUnitBases) -> Vec<f64> {
        bases.state4()[..self.states()].to_vec()
    }

    pub fn output_bases(self, bases: &PerUnitBases) -> Vec<f64> {
        [bases.rotor_speed, bases.generator_torque][..self.outputs()].to_vec()
    }
}

/// One local affine model `ẋ = A x + B u + B_d v + E w + a`, `y = C x + F w + c`,
/// in SI units. Inputs are `[β, T_g]` (torque demand for the 4-state model).
#[derive(Debug, Clone, PartialEq)]
pub struct TsSubmodel {
    pub kind: ModelKind,
    pub a: Mat,
    pub b: Mat,
    pub bd: Mat,
    pub c: Mat,
    pub e: Mat,
    pub f: Mat,
    pub affine_state: DVector<f64>,
    pub affine_output: DVector<f64>,
    pub operating_point: OperatingPoint,
}

/// Per-unit state-space triple used for synthesis.
#[derive(Debug, Clone, PartialEq)]
pub struct PerUnitModel {
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
}

impl TsSubmodel {
    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn operating_state(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.operating_point.state[..self.states()])
    }

    pub fn operating_inputs(&self) -> DVector<f64> {
        DVector::from_column_slice(&[self.operating_point.pitch, self.operating_point.generator_torque])
    }

    /// Affine right-hand side evaluated at `(x, u, v)`.
    pub fn rhs(&self, x: &DVector<f64>, u: &DVector<f64>, v: f64) -> DVector<f64> {
        &self.a * x + &self.b * u + &self.bd * v + &self.affine_state
    }

    /// `x_pu = D_x⁻¹ x`, `u_pu = D_u⁻¹ u`, `y_pu = D_y⁻¹ y`.
    pub fn per_unit(&self, bases: &PerUnitBases) -> PerUnitModel {
        let dx = diag(&self.kind.state_bases(bases));
        let dx_inv = diag(&self.kind.state_bases(bases).iter().map(|b| 1.0 / b).collect::<Vec<_>>());
        let du = diag(&bases.inputs());
        let dy_inv = diag(&self.kind.output_bases(bases).iter().map(|b| 1.0 / b).collect::<Vec<_>>());
        PerUnitModel {
            a: &dx_inv * &self.a * &dx,
            b: &dx_inv * &self.b * du,
            c: dy_inv * &self.c * dx,
        }
    }
}

pub(crate) fn ensure_controllable(index: usize, model: &PerUnitModel) -> Result<()> {
    if rank(&controllability_matrix(&model.a, &model.b), 1e-10) < model.a.nrows() {
        return Err(Error::Uncontrollable { index });
    }
    Ok(())
}

/// Linearizes the chosen plant at every operating point. Only the aerodynamic
/// torque is differentiated numerically; drive-train entries are exact.
pub fn build_submodels(
    kind: ModelKind,
    grid: &[OperatingPoint],
    params: &TurbineParams,
    surface: &CoefficientSurface,
) -> Result<Vec<TsSubmodel>> {
    let bases = params.bases();
    let mut out = Vec::with_capacity(grid.len());
    for op in grid {
        let torque = |p: &[f64]| vec![rotor_torque(p[2], p[0], p[1], surface, params)];
        let g = jacobian(torque, &[op.state[0], op.pitch, op.wind])?;
        let (dw, db, dv) = (g[(0, 0)], g[(0, 1)], g[(0, 2)]);

        let n = params.gear_ratio;
        let (jr, jg) = (params.inertia_rotor, params.inertia_generator);
        let (ks, ds) = (params.shaft_stiffness, params.shaft_damping);
        let tau = params.torque_actuator_tau;
        let (a, b, bd, c) = match kind {
            ModelKind::OneDof => {
                let j = params.rigid_inertia();
                (
                    Mat::from_element(1, 1, dw / j),
                    Mat::from_row_slice(1, 2, &[db / j, -n / j]),
                    Mat::from_element(1, 1, dv / j),
                    Mat::from_element(1, 1, 1.0),
                )
            }
            ModelKind::ThreeDof => (
                Mat::from_row_slice(3, 3, &[
                    dw / jr - ds * n * n / jr, ds * n / jr, -ks * n * n / jr,
                    ds * n / jg, -ds / jg, ks * n / jg,
                    1.0, -1.0 / n, 0.0,
                ]),
                Mat::from_row_slice(3, 2, &[db / jr, 0.0, 0.0, -1.0 / jg, 0.0, 0.0]),
                Mat::from_row_slice(3, 1, &[dv / jr, 0.0, 0.0]),
                Mat::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            ),
            ModelKind::FourState => (
                Mat::from_row_slice(4, 4, &[
                    dw / jr - ds * n * n / jr, ds * n / jr, -ks * n * n / jr, 0.0,
                    ds * n / jg, -ds / jg, ks * n / jg, -1.0 / jg,
                    1.0, -1.0 / n, 0.0, 0.0,
                    0.0, 0.0, 0.0, -1.0 / tau,
                ]),
                Mat::from_row_slice(4, 2, &[db / jr, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0 / tau]),
                Mat::from_row_slice(4, 1, &[dv / jr, 0.0, 0.0, 0.0]),
                Mat::from_row_slice(2, 4, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            ),
        };
        let states = kind.states();
        let outputs = kind.outputs();
        let mut model = TsSubmodel {
            kind,
            a,
            b,
            bd,
            c,
            e: Mat::zeros(states, outputs),
            f: Mat::zeros(outputs, outputs),
            affine_state: DVector::zeros(states),
            affine_output: DVector::zeros(outputs),
            operating_point: *op,
        };
        let x0 = model.operating_state();
        let u0 = model.operating_inputs();
        model.affine_state = -(&model.a * &x0) - &model.b * &u0 - &model.bd * op.wind;

        ensure_controllable(op.index, &model.per_unit(&bases))?;
        out.push(model);
    }
    Ok(out)
}
