use alloc::string::ToString;
use alloc::vec::Vec;

use super::{assemble_lmis, augment, build_reference_model, AugmentedModel, MrcLmi, ReferenceKind, SynthesisSpec};
use crate::linalg::{select_columns, Mat};
use crate::sdp::{solve, SdpSolution, SolveOptions};
use crate::ts::{ensure_controllable, MembershipGrid, ModelKind, PerUnitModel, TsSubmodel};
use crate::turbine::PerUnitBases;
use crate::{Error, Result};

/// The two loop designs that make up the controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Design {
    /// Rigid drive train, pitch input, rotor-speed reference.
    Speed,
    /// 4-state drive train, both inputs, speed and torque references.
    Torque,
}

impl Design {
    pub fn model_kind(self) -> ModelKind {
        match self {
            Design::Speed => ModelKind::OneDof,
            Design::Torque => ModelKind::FourState,
        }
    }

    pub fn reference_kind(self) -> ReferenceKind {
        match self {
            Design::Speed => ReferenceKind::SpeedOnly,
            Design::Torque => ReferenceKind::SpeedAndTorque,
        }
    }

    fn input_columns(self) -> &'static [usize] {
        match self {
            Design::Speed => &[0],
            Design::Torque => &[0, 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ScheduleKind {
    Speed,
    Torque,
    Combined,
}

/// One feedback gain per grid node, acting on per-unit augmented coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSchedule {
    pub kind: ScheduleKind,
    pub nodes: Vec<f64>,
    pub gains: Vec<Mat>,
}

impl GainSchedule {
    pub fn grid(&self) -> Result<MembershipGrid> {
        MembershipGrid::new(self.nodes.clone())
    }

    /// `Σ h_j K_j`.
    pub fn blend(&self, h: &[f64]) -> Mat {
        let mut k = Mat::zeros(self.gains[0].nrows(), self.gains[0].ncols());
        for (kj, hj) in self.gains.iter().zip(h) {
            if *hj != 0.0 {
                k += kj * *hj;
            }
        }
        k
    }
}

/// Per-unit plants restricted to the inputs the design actuates.
pub fn design_plants(design: Design, submodels: &[TsSubmodel], bases: &PerUnitBases) -> Result<Vec<PerUnitModel>> {
    submodels
        .iter()
        .enumerate()
        .map(|(index, s)| {
            if s.kind != design.model_kind() {
                return Err(Error::Dimension(alloc::format!(
                    "{design:?} design needs {:?} submodels, got {:?}",
                    design.model_kind(),
                    s.kind
                )));
            }
            let mut p = s.per_unit(bases);
            p.b = select_columns(&p.b, design.input_columns());
            ensure_controllable(index, &p)?;
            Ok(p)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub schedule: GainSchedule,
    pub x: Mat,
    pub gamma: f64,
    pub augmented: Vec<AugmentedModel>,
    pub lmi: MrcLmi,
    pub solution: SdpSolution,
}

pub fn synthesize(
    design: Design,
    plants: &[PerUnitModel],
    grid: &MembershipGrid,
    spec: &SynthesisSpec,
    opts: &SolveOptions,
) -> Result<Synthesis> {
    spec.validate()?;
    if plants.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let reference = build_reference_model(design.reference_kind(), &spec.taus)?;
    let augmented = augment(plants, &reference)?;
    let lmi = assemble_lmis(&augmented, &grid.active_pairs(), spec)?;
    let solution = solve(&lmi.problem, opts)?;
    if !solution.status.is_solved() {
        let worst = solution
            .margins
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.margin.total_cmp(&b.1.margin))
            .map(|(k, _)| lmi.families[k].name())
            .unwrap_or("none");
        return Err(Error::Infeasible {
            status: solution.status.to_string(),
            family: worst.to_string(),
            spec: spec.summary(),
        });
    }
    let gains = lmi.gains(&solution.values)?;
    let kind = match design {
        Design::Speed => ScheduleKind::Speed,
        Design::Torque => ScheduleKind::Torque,
    };
    Ok(Synthesis {
        schedule: GainSchedule { kind, nodes: grid.nodes().to_vec(), gains },
        x: lmi.x_value(&solution.values),
        gamma: lmi.gamma(&solution.values, spec),
        augmented,
        lmi,
        solution,
    })
}

/// Merges the speed gains (pitch row) and the torque gains (torque row) into
/// gains on `[ω_r, ω_g, Δθ, T_g, x^r_ω, x^r_T, x_I,ω, x_I,T]`.
pub fn combine_gains(speed: &GainSchedule, torque: &GainSchedule) -> Result<GainSchedule> {
    if speed.nodes != torque.nodes || speed.gains.len() != torque.gains.len() {
        return Err(Error::GridMismatch);
    }
    let gains = speed
        .gains
        .iter()
        .zip(&torque.gains)
        .map(|(ks, kt)| {
            if ks.shape() != (1, 3) || kt.shape() != (2, 8) {
                return Err(Error::Dimension(alloc::format!(
                    "expected 1x3 speed and 2x8 torque gains, got {:?} and {:?}",
                    ks.shape(),
                    kt.shape()
                )));
            }
            let mut k = Mat::zeros(2, 8);
            k[(0, 0)] = ks[(0, 0)];
            k[(0, 4)] = ks[(0, 1)];
            k[(0, 6)] = ks[(0, 2)];
            for c in [0, 1, 2, 3, 5, 7] {
                k[(1, c)] = kt[(1, c)];
            }
            Ok(k)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GainSchedule { kind: ScheduleKind::Combined, nodes: speed.nodes.clone(), gains })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn schedules() -> (GainSchedule, GainSchedule) {
        let speed = GainSchedule {
            kind: ScheduleKind::Speed,
            nodes: vec![12.0, 13.0],
            gains: vec![Mat::from_row_slice(1, 3, &[1.0, 2.0, 3.0]); 2],
        };
        let torque = GainSchedule {
            kind: ScheduleKind::Torque,
            nodes: vec![12.0, 13.0],
            gains: vec![Mat::from_fn(2, 8, |r, c| (10 * (r + 1) + c + 1) as f64); 2],
        };
        (speed, torque)
    }

    #[test]
    fn combined_zero_pattern() {
        let (s, t) = schedules();
        let k = &combine_gains(&s, &t).unwrap().gains[0];
        assert_eq!(k.row(0).iter().copied().collect::<Vec<_>>(), [1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 3.0, 0.0]);
        assert_eq!(k.row(1).iter().copied().collect::<Vec<_>>(), [21.0, 22.0, 23.0, 24.0, 0.0, 26.0, 0.0, 28.0]);
    }

    #[test]
    fn combine_rejects_other_grid() {
        let (s, mut t) = schedules();
        t.nodes[1] = 14.0;
        assert_eq!(combine_gains(&s, &t), Err(Error::GridMismatch));
    }

    #[test]
    fn blend_at_node_is_node_gain() {
        let (_, mut t) = schedules();
        t.gains[1] *= 2.0;
        let h = t.grid().unwrap().weights(13.0);
        assert_eq!(t.blend(&h), t.gains[1]);
    }
}
