//! CSV outputs and the console summary.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use tsmrc_core::mrc::{EigenReport, Synthesis};
use tsmrc_core::sim::{Scenario, SimConfig, SimTrace};
use tsmrc_core::turbine::TurbineParams;

use crate::error::{CliError, CliResult};
use crate::pipeline::VerifyReport;

pub const TRACE_HEADER: [&str; 14] = [
    "t", "v", "z", "omega_r", "omega_g", "dtheta", "T_g", "beta", "T_g_d", "omega_r_ref", "T_g_ref", "eps_omega", "eps_T",
    "P_g",
];

fn create(op: &'static str, path: &Path) -> CliResult<File> {
    File::create(path).map_err(|source| CliError::Io { op, path: path.into(), source })
}

fn csv_err(op: &'static str) -> impl Fn(csv::Error) -> CliError {
    move |e| CliError::Csv { op, message: e.to_string() }
}

/// Metadata comment line, header, then one row per sample.
pub fn write_trace(path: &Path, trace: &SimTrace) -> CliResult<()> {
    let op = "write-trace";
    let mut file = create(op, path)?;
    let seed = trace.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    writeln!(file, "# scenario={},seed={},dt={},limits={}", trace.scenario, seed, trace.dt, trace.limits)
        .map_err(|source| CliError::Io { op, path: path.into(), source })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(TRACE_HEADER).map_err(csv_err(op))?;
    for s in &trace.samples {
        let row = [
            s.t, s.v, s.z, s.omega_r, s.omega_g, s.dtheta, s.torque, s.pitch, s.torque_demand, s.omega_r_ref, s.torque_ref,
            s.error[0], s.error[1], s.power,
        ];
        w.serialize(row).map_err(csv_err(op))?;
    }
    w.flush().map_err(|source| CliError::Io { op, path: path.into(), source })
}

/// One row per closed-loop eigenvalue of every checked pair.
pub fn write_eigenvalues(path: &Path, reports: &[(&str, &EigenReport)]) -> CliResult<()> {
    let op = "write-eigenvalues";
    let mut w = csv::Writer::from_writer(create(op, path)?);
    w.write_record(["schedule", "i", "j", "re", "im", "class"]).map_err(csv_err(op))?;
    for (name, report) in reports {
        for s in &report.spectra {
            let rows = s.reference.iter().map(|z| (z, "reference")).chain(s.shaped.iter().map(|z| (z, "shaped")));
            for (z, class) in rows {
                let violated = report.violations.iter().find(|v| v.pair == s.pair && v.eigenvalue == *z);
                let class = violated.map_or(class.to_string(), |v| format!("violates-{}", v.bound));
                w.serialize((name, s.pair.0, s.pair.1, z.re, z.im, class)).map_err(csv_err(op))?;
            }
        }
    }
    w.flush().map_err(|source| CliError::Io { op, path: path.into(), source })
}

/// Re-verified margin of every LMI block of both designs.
pub fn write_margins(path: &Path, runs: &[(&str, &Synthesis)]) -> CliResult<()> {
    let op = "write-margins";
    let mut w = csv::Writer::from_writer(create(op, path)?);
    w.write_record(["design", "block", "label", "family", "min_eig", "max_eig", "margin"]).map_err(csv_err(op))?;
    for (name, run) in runs {
        for (k, ((block, family), m)) in
            run.lmi.problem.blocks().iter().zip(&run.lmi.families).zip(&run.solution.margins).enumerate()
        {
            w.serialize((name, k, &block.label, family.name(), m.min_eig, m.max_eig, m.margin)).map_err(csv_err(op))?;
        }
    }
    w.flush().map_err(|source| CliError::Io { op, path: path.into(), source })
}

pub fn write_norms(path: &Path, report: &VerifyReport) -> CliResult<()> {
    let op = "write-norms";
    let mut w = csv::Writer::from_writer(create(op, path)?);
    w.write_record(["design", "vertex", "hinf", "gamma", "pass"]).map_err(csv_err(op))?;
    for n in &report.norms {
        let design = format!("{:?}", n.design).to_lowercase();
        w.serialize((design, n.vertex, n.norm, n.gamma, n.passes())).map_err(csv_err(op))?;
    }
    w.flush().map_err(|source| CliError::Io { op, path: path.into(), source })
}

/// Headline numbers of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub name: String,
    pub final_eps_omega: f64,
    pub final_eps_torque: f64,
    /// Largest |Δθ| relative to the rated torsion.
    pub max_torsion: f64,
    /// Last time ω_r left a ±2 % band around its reference.
    pub omega_settled_at: f64,
    /// T_g in p.u. at the end of the fault window.
    pub torque_after_fault: Option<f64>,
}

pub fn summarize(scenario: &Scenario, trace: &SimTrace, cfg: &SimConfig, params: &TurbineParams) -> ScenarioSummary {
    let last = trace.samples.last().copied().unwrap_or_default();
    let max_torsion = trace.samples.iter().map(|s| s.dtheta.abs()).fold(0.0, f64::max) / params.rated_torsion();
    let omega_settled_at = trace
        .samples
        .iter()
        .filter(|s| (s.omega_r / s.omega_r_ref - 1.0).abs() > 0.02)
        .map(|s| s.t)
        .fold(0.0, f64::max);
    let torque_after_fault = matches!(scenario, Scenario::Frt)
        .then(|| trace.at(cfg.frt_start + cfg.frt_duration).torque / params.rated_generator_torque);
    ScenarioSummary {
        name: trace.scenario.clone(),
        final_eps_omega: last.error[0],
        final_eps_torque: last.error[1],
        max_torsion,
        omega_settled_at,
        torque_after_fault,
    }
}

pub fn summary_table(rows: &[ScenarioSummary]) -> String {
    let mut out = format!(
        "{:<16} {:>12} {:>12} {:>10} {:>12} {:>16}\n",
        "scenario", "eps_omega", "eps_T", "max|dth|", "omega_2%@s", "T_g@fault+dur"
    );
    for r in rows {
        let frt = r.torque_after_fault.map_or("-".to_string(), |v| format!("{v:.4}"));
        out += &format!(
            "{:<16} {:>12.3e} {:>12.3e} {:>10.3} {:>12.2} {:>16}\n",
            r.name, r.final_eps_omega, r.final_eps_torque, r.max_torsion, r.omega_settled_at, frt
        );
    }
    out
}
