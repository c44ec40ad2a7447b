//! Orchestration shared by the subcommands and the acceptance suite.

use std::path::Path;

use rayon::prelude::*;
use tsmrc_core::mrc::{
    assemble_lmis, augment, build_reference_model, combine_gains, design_plants, synthesize, verify_dregion,
    vertex_hinf, AugmentedModel, DRegion, Design, EigenReport, GainSchedule, ReferenceKind, Synthesis, SynthesisSpec,
};
use tsmrc_core::sim::{run_scenario, Controller, Scenario, SimContext, SimTrace};
use tsmrc_core::ts::{build_grid, build_submodels, MembershipGrid, OperatingPoint, PerUnitModel};
use tsmrc_core::turbine::{calibrate_surface, CoefficientSurface, TurbineParams};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::formats::{write_toml, ProblemFile};

/// Calibrated surface and the operating-point grid.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub params: TurbineParams,
    pub surface: CoefficientSurface,
    pub points: Vec<OperatingPoint>,
    pub grid: MembershipGrid,
}

pub fn prepare(cfg: &RunConfig) -> CliResult<Prepared> {
    let params = cfg.turbine.clone();
    let surface = calibrate_surface(&params).map_err(CliError::core("calibrate"))?;
    let points = build_grid(&params, &surface, cfg.grid.v_lo, cfg.grid.v_hi, cfg.grid.nodes)
        .map_err(CliError::core("build-grid"))?;
    let grid = MembershipGrid::from_points(&points).map_err(CliError::core("build-grid"))?;
    Ok(Prepared { params, surface, points, grid })
}

impl Prepared {
    pub fn plants(&self, design: Design) -> CliResult<Vec<PerUnitModel>> {
        let subs = build_submodels(design.model_kind(), &self.points, &self.params, &self.surface)
            .map_err(CliError::core("build-submodels"))?;
        design_plants(design, &subs, &self.params.bases()).map_err(CliError::core("build-submodels"))
    }

    /// Torque-design plants closed with the reference taus used in operation.
    pub fn combined_augmented(&self, cfg: &RunConfig) -> CliResult<Vec<AugmentedModel>> {
        let taus = [cfg.speed.taus[0], cfg.torque.taus.get(1).copied().unwrap_or(cfg.simulation.torque_reference_tau)];
        let reference =
            build_reference_model(ReferenceKind::SpeedAndTorque, &taus).map_err(CliError::core("verify"))?;
        augment(&self.plants(Design::Torque)?, &reference).map_err(CliError::core("verify"))
    }

    pub fn augmented(&self, design: Design, spec: &SynthesisSpec) -> CliResult<Vec<AugmentedModel>> {
        let reference = build_reference_model(design.reference_kind(), &spec.taus).map_err(CliError::core("verify"))?;
        augment(&self.plants(design)?, &reference).map_err(CliError::core("verify"))
    }

    pub fn sim_context(&self, combined: GainSchedule) -> CliResult<SimContext> {
        let controller =
            Controller::new(combined, &self.points, self.params.bases()).map_err(CliError::core("simulate"))?;
        Ok(SimContext { params: self.params.clone(), surface: self.surface, controller })
    }
}

/// Region that the combined schedule is checked against.
pub fn combined_region(cfg: &RunConfig) -> DRegion {
    cfg.speed.region().union(&cfg.torque.region())
}

#[derive(Debug, Clone)]
pub struct SynthesisRun {
    pub speed: Synthesis,
    pub torque: Synthesis,
    pub combined: GainSchedule,
    pub check: VerifyReport,
}

fn design_one(
    cfg: &RunConfig,
    prep: &Prepared,
    design: Design,
    spec: &SynthesisSpec,
    dump_dir: Option<&Path>,
) -> CliResult<Synthesis> {
    let plants = prep.plants(design)?;
    let result = synthesize(design, &plants, &prep.grid, spec, &cfg.solver.options());
    if let (Err(tsmrc_core::Error::Infeasible { .. }), Some(dir)) = (&result, dump_dir) {
        let reference = build_reference_model(design.reference_kind(), &spec.taus).map_err(CliError::core("synthesize"))?;
        let aug = augment(&plants, &reference).map_err(CliError::core("synthesize"))?;
        if let Ok(lmi) = assemble_lmis(&aug, &prep.grid.active_pairs(), spec) {
            let name = format!("failed-{}.sdp.toml", format!("{design:?}").to_lowercase());
            write_toml("synthesize", &dir.join(name), &ProblemFile::new(&lmi.problem))?;
        }
    }
    result.map_err(CliError::core("synthesize"))
}

/// Speed and torque designs (concurrently), gain combination and checks.
pub fn synthesize_all(cfg: &RunConfig, prep: &Prepared, dump_dir: Option<&Path>) -> CliResult<SynthesisRun> {
    for spec in [&cfg.speed, &cfg.torque] {
        spec.validate().map_err(CliError::core("synthesize"))?;
    }
    let (speed, torque) = rayon::join(
        || design_one(cfg, prep, Design::Speed, &cfg.speed, dump_dir),
        || design_one(cfg, prep, Design::Torque, &cfg.torque, dump_dir),
    );
    let (speed, torque) = (speed?, torque?);
    let combined = combine_gains(&speed.schedule, &torque.schedule).map_err(CliError::core("combine"))?;
    let check = verify(cfg, prep, Some(&speed.schedule), Some(&torque.schedule), &combined)?;
    Ok(SynthesisRun { speed, torque, combined, check })
}

#[derive(Debug, Clone)]
pub struct VertexNorm {
    pub design: Design,
    pub vertex: usize,
    /// `f64::INFINITY` for an unstable vertex.
    pub norm: f64,
    pub gamma: f64,
}

impl VertexNorm {
    pub fn passes(&self) -> bool {
        self.norm <= self.gamma * (1.0 + 1e-3)
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub combined: EigenReport,
    pub designs: Vec<(Design, EigenReport)>,
    pub norms: Vec<VertexNorm>,
}

impl VerifyReport {
    pub fn violation_count(&self) -> usize {
        self.combined.violations.len()
            + self.designs.iter().map(|(_, r)| r.violations.len()).sum::<usize>()
            + self.norms.iter().filter(|n| !n.passes()).count()
    }
}

/// Region and vertex gain checks of every schedule that is present.
pub fn verify(
    cfg: &RunConfig,
    prep: &Prepared,
    speed: Option<&GainSchedule>,
    torque: Option<&GainSchedule>,
    combined: &GainSchedule,
) -> CliResult<VerifyReport> {
    let pairs = prep.grid.active_pairs();
    let tol = 1e-6;
    for s in [speed, torque].into_iter().flatten().chain([combined]) {
        if s.gains.len() != prep.grid.len() || s.nodes.iter().zip(prep.grid.nodes()).any(|(a, b)| (a - b).abs() > 1e-9) {
            return Err(CliError::Core { op: "verify", source: tsmrc_core::Error::GridMismatch });
        }
    }
    let combined_report = verify_dregion(&prep.combined_augmented(cfg)?, combined, &combined_region(cfg), &pairs, tol);
    let mut designs = Vec::new();
    let mut norms = Vec::new();
    for (design, spec, schedule) in [(Design::Speed, &cfg.speed, speed), (Design::Torque, &cfg.torque, torque)] {
        let Some(schedule) = schedule else { continue };
        let aug = prep.augmented(design, spec)?;
        designs.push((design, verify_dregion(&aug, schedule, &spec.region(), &pairs, tol)));
        let gamma = spec.gamma;
        norms.extend(aug.iter().zip(&schedule.gains).enumerate().map(|(vertex, (a, k))| VertexNorm {
            design,
            vertex,
            norm: vertex_hinf(a, k, vertex).unwrap_or(f64::INFINITY),
            gamma,
        }));
    }
    Ok(VerifyReport { combined: combined_report, designs, norms })
}

/// Runs every scenario on its own worker; results keep the input order.
pub fn run_scenarios(cfg: &RunConfig, ctx: &SimContext) -> Vec<(Scenario, CliResult<SimTrace>)> {
    cfg.scenarios
        .par_iter()
        .map(|s| (s.clone(), run_scenario(&cfg.simulation, s, ctx).map_err(CliError::core("simulate"))))
        .collect()
}
