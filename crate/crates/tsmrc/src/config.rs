use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsmrc_core::mrc::SynthesisSpec;
use tsmrc_core::sdp::SolveOptions;
use tsmrc_core::sim::{Scenario, SimConfig};
use tsmrc_core::turbine::TurbineParams;

use crate::error::{CliError, CliResult};
use crate::formats::{load_params, read_toml};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub v_lo: f64,
    pub v_hi: f64,
    pub nodes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { v_lo: 12.0, v_hi: 24.0, nodes: 13 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub tol: f64,
    pub max_iter: usize,
    pub margin: f64,
    pub box_radius: f64,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let o = SolveOptions::default();
        Self { tol: o.tol, max_iter: o.max_iter, margin: o.margin, box_radius: o.box_radius }
    }
}

impl SolverSpec {
    pub fn options(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter, margin: self.margin, box_radius: self.box_radius }
    }
}

/// Everything a run needs. Every field has a default, so an empty file
/// reproduces the reference pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Optional parameter file; replaces `turbine` when set.
    pub turbine_file: Option<PathBuf>,
    pub turbine: TurbineParams,
    pub grid: GridSpec,
    pub speed: SynthesisSpec,
    pub torque: SynthesisSpec,
    pub solver: SolverSpec,
    pub simulation: SimConfig,
    pub scenarios: Vec<Scenario>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let turbulent = [12.0, 14.0, 16.0, 18.0]
            .into_iter()
            .enumerate()
            .map(|(k, mean)| Scenario::Turbulent { mean, intensity: 0.1, seed: k as u64 });
        Self {
            turbine_file: None,
            turbine: TurbineParams::default(),
            grid: GridSpec::default(),
            speed: SynthesisSpec::speed(),
            torque: SynthesisSpec::torque(),
            solver: SolverSpec::default(),
            simulation: SimConfig::default(),
            scenarios: turbulent
                .chain([
                    Scenario::Gust { speed: 12.0 },
                    Scenario::Gust { speed: 14.0 },
                    Scenario::Frt,
                    Scenario::Simultaneous,
                ])
                .collect(),
            output: None,
        }
    }
}

impl RunConfig {
    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let mut cfg: RunConfig = read_toml("config", path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = cfg.turbine_file.as_mut().filter(|p| p.is_relative()) {
            *p = dir.join(&*p);
        }
        if let Some(p) = cfg.output.as_mut().filter(|p| p.is_relative()) {
            *p = dir.join(&*p);
        }
        cfg.resolve()?;
        Ok(cfg)
    }

    pub fn resolve(&mut self) -> CliResult<()> {
        if let Some(p) = &self.turbine_file {
            if !p.exists() {
                return Err(CliError::Rejected { op: "config", message: format!("turbine_file {} does not exist", p.display()) });
            }
            self.turbine = load_params(p)?;
        }
        self.turbine.validate().map_err(CliError::core("config"))?;
        Ok(())
    }

    /// Gives turbulent runs distinct streams derived from one base seed.
    pub fn reseed(&mut self, base: u64) {
        let mut k = 0;
        for s in &mut self.scenarios {
            if let Scenario::Turbulent { seed, .. } = s {
                *seed = base.wrapping_add(k);
                k += 1;
            }
        }
    }
}
