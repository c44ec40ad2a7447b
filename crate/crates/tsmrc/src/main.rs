use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tsmrc::error::{CliError, CliResult};
use tsmrc::formats::{load_gains, require_schedule, write_toml, GainsFile, ModelFile};
use tsmrc::pipeline::{prepare, run_scenarios, synthesize_all, verify};
use tsmrc::report::{summarize, summary_table, write_eigenvalues, write_margins, write_norms, write_trace};
use tsmrc::RunConfig;
use tsmrc_core::mrc::ScheduleKind;
use tsmrc_core::ts::{build_submodels, ModelKind};

/// Takagi-Sugeno model reference control: calibrate, synthesize, verify, simulate.
///
/// Exit codes: 0 success, 1 input/output or parse error, 2 infeasible synthesis
/// or failed closed-loop check, 3 missing gains file.
#[derive(Debug, Parser)]
#[command(name = "tsmrc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (TOML); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Base seed for turbulent wind.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Gains file (defaults to <out>/gains.toml).
    #[arg(long, global = true)]
    gains: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the aerodynamic surface and write parameters and submodel files.
    Calibrate,
    /// Run both LMI designs, combine and check the gains.
    Synthesize,
    /// Simulate the configured scenarios with an existing gains file.
    Simulate,
    /// Re-check an existing gains file.
    Verify,
}

fn io<'a>(op: &'static str, path: &'a Path) -> impl FnOnce(std::io::Error) -> CliError + 'a {
    move |source| CliError::Io { op, path: path.into(), source }
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.reseed(seed);
    }
    let out = cli.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).map_err(io("output", &out))?;
    let gains_path = cli.gains.clone().unwrap_or_else(|| out.join("gains.toml"));

    match cli.command {
        Command::Calibrate => {
            let prep = prepare(&cfg)?;
            write_toml("calibrate", &out.join("params.toml"), &prep.params)?;
            write_toml("calibrate", &out.join("surface.toml"), &prep.surface)?;
            for kind in [ModelKind::OneDof, ModelKind::ThreeDof, ModelKind::FourState] {
                let subs = build_submodels(kind, &prep.points, &prep.params, &prep.surface)
                    .map_err(CliError::core("calibrate"))?;
                let name = format!("models-{}.toml", format!("{kind:?}").to_lowercase());
                write_toml("calibrate", &out.join(name), &ModelFile::new(kind, &subs))?;
            }
            let s = &prep.surface;
            println!("surface coefficients {:?}", s.c);
            println!(
                "c_P(7.55, 0) = {:.5}, argmax lambda = {:.4}",
                s.cp(7.55, 0.0),
                s.argmax_lambda(0.0, 2.0, 14.0)
            );
            for p in &prep.points {
                println!("v = {:5.2} m/s  pitch = {:7.4} deg", p.wind, p.pitch.to_degrees());
            }
        }
        Command::Synthesize => {
            let prep = prepare(&cfg)?;
            let run = synthesize_all(&cfg, &prep, Some(&out))?;
            write_toml(
                "synthesize",
                &gains_path,
                &GainsFile::new(&[&run.speed.schedule, &run.torque.schedule, &run.combined]),
            )?;
            write_margins(&out.join("margins.csv"), &[("speed", &run.speed), ("torque", &run.torque)])?;
            let designs: Vec<(String, _)> =
                run.check.designs.iter().map(|(d, r)| (format!("{d:?}").to_lowercase(), r)).collect();
            let mut reports: Vec<(&str, _)> = vec![("combined", &run.check.combined)];
            reports.extend(designs.iter().map(|(n, r)| (n.as_str(), *r)));
            write_eigenvalues(&out.join("eigenvalues.csv"), &reports)?;
            write_norms(&out.join("hinf.csv"), &run.check)?;
            for (name, s) in [("speed", &run.speed), ("torque", &run.torque)] {
                let worst = s.solution.margins.iter().map(|m| m.margin).fold(f64::INFINITY, f64::min);
                println!(
                    "{name}: {} after {} iterations, gamma {:.4}, smallest block margin {worst:.3e}",
                    s.solution.status, s.solution.iterations, s.gamma
                );
            }
            println!("gains written to {}", gains_path.display());
            let count = run.check.violation_count();
            if count > 0 {
                return Err(CliError::RegionViolation { op: "synthesize", count });
            }
        }
        Command::Simulate => {
            let file = load_gains("simulate", &gains_path)?;
            let combined = require_schedule("simulate", &gains_path, &file, ScheduleKind::Combined)?;
            if cfg.scenarios.is_empty() {
                eprintln!("simulate: warning: scenario list is empty, nothing to do");
                return Ok(());
            }
            let prep = prepare(&cfg)?;
            let ctx = prep.sim_context(combined)?;
            let mut rows = Vec::new();
            let mut first_err = None;
            for (scenario, result) in run_scenarios(&cfg, &ctx) {
                match result {
                    Ok(trace) => {
                        write_trace(&out.join(format!("{}.csv", trace.scenario)), &trace)?;
                        rows.push(summarize(&scenario, &trace, &cfg.simulation, &prep.params));
                    }
                    Err(e) => {
                        eprintln!("simulate: {} failed: {e}", scenario.name());
                        first_err.get_or_insert(e);
                    }
                }
            }
            print!("{}", summary_table(&rows));
            if let Some(e) = first_err {
                return Err(e);
            }
        }
        Command::Verify => {
            let file = load_gains("verify", &gains_path)?;
            let combined = require_schedule("verify", &gains_path, &file, ScheduleKind::Combined)?;
            let parse = |kind| file.get(kind).map_err(|message| CliError::Parse { op: "verify", path: gains_path.clone(), message });
            let speed = parse(ScheduleKind::Speed)?;
            let torque = parse(ScheduleKind::Torque)?;
            let prep = prepare(&cfg)?;
            let report = verify(&cfg, &prep, speed.as_ref(), torque.as_ref(), &combined)?;
            let designs: Vec<(String, _)> =
                report.designs.iter().map(|(d, r)| (format!("{d:?}").to_lowercase(), r)).collect();
            let mut reports: Vec<(&str, _)> = vec![("combined", &report.combined)];
            reports.extend(designs.iter().map(|(n, r)| (n.as_str(), *r)));
            write_eigenvalues(&out.join("verify-eigenvalues.csv"), &reports)?;
            write_norms(&out.join("verify-hinf.csv"), &report)?;
            for (name, r) in &reports {
                println!("{name}: {} pairs, {} region violations", r.spectra.len(), r.violations.len());
                for v in r.violations.iter().take(5) {
                    println!("  pair {:?}: {:.4} {:+.4}i violates {}", v.pair, v.eigenvalue.re, v.eigenvalue.im, v.bound);
                }
            }
            let worst = report.norms.iter().map(|n| n.norm / n.gamma).fold(0.0, f64::max);
            println!("vertex H-infinity: worst norm / gamma = {worst:.4}");
            let count = report.violation_count();
            if count > 0 {
                return Err(CliError::RegionViolation { op: "verify", count });
            }
            println!("verify: pass");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tsmrc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
