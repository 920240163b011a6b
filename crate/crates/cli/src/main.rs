//! `rvn`: simulate, verify and diagnose.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 tolerance breach,
//! 3 numerical instability.

mod config;
mod diagnose;
mod report;
mod simulate;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{parse_mode, RunConfig};
use report::{write_json, RunManifest};
use verify::{Suite, VerifyOptions};

const BREACH: u8 = 2;
const UNSTABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "rvn", version, about = "Kinetic/scalar-wave solver with geometry and decay diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Counts may be written in scientific notation, e.g. `1e5`.
fn parse_count(s: &str) -> Result<usize, String> {
    let x: f64 = s.parse().map_err(|e| format!("'{s}' is not a number: {e}"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= 1e12) {
        return Err(format!("'{s}' is not a positive whole count"));
    }
    Ok(x as usize)
}

#[derive(Subcommand)]
enum Command {
    /// Run the solver from an INI configuration, writing energies.csv,
    /// report.json and optional snapshots.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[run] seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `[time] cadence` (steps between diagnostics).
        #[arg(long)]
        cadence: Option<usize>,
        #[arg(long, default_value = "rvn-out")]
        out: PathBuf,
    },
    /// Check the geometry, Fourier and profile identities against the
    /// independent references; exits 2 on any tolerance breach.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "1e4", value_parser = parse_count)]
        samples: usize,
        #[arg(long, default_value = "rvn-out")]
        out: PathBuf,
        /// Relative error injected into every table evaluation (negative control).
        #[arg(long, default_value_t = 0.0, hide = true)]
        perturb: f64,
    },
    /// Decay scans, fits and the weight-ratio check over saved snapshots.
    Diagnose {
        /// Glob of snapshot files, e.g. 'rvn-out/snapshots/*.rvn'.
        snapshots: String,
        /// Diagnostics settings; only the `[diagnostics]` section is read.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dynamics the snapshots came from: free-transport, free-wave,
        /// linear-coupled or coupled.
        #[arg(long, default_value = "coupled", value_parser = |s: &str| parse_mode(s).map_err(|e| e.to_string()))]
        mode: rvn_core::solver::Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Samples for the weight-ratio check.
        #[arg(long, default_value = "1e5", value_parser = parse_count)]
        samples: usize,
        #[arg(long, default_value = "rvn-out")]
        out: PathBuf,
    },
}

fn finish(mut manifest: RunManifest, out: &Path, start: Instant, code: u8) -> Result<ExitCode> {
    manifest.wall_clock_s = start.elapsed().as_secs_f64();
    manifest.exit_code = code;
    let path = out.join("manifest.json");
    manifest.outputs.push(path.clone());
    write_json(&path, &manifest)?;
    Ok(ExitCode::from(code))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let start = Instant::now();
    match cli.command {
        Command::Simulate { config, seed, cadence, out } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.sim.seed = s;
            }
            if let Some(c) = cadence {
                cfg.sim.cadence = c;
            }
            let mut manifest = RunManifest::new("simulate", cfg.sim.seed, serde_json::to_value(&cfg)?);
            let outcome = simulate::run(&cfg, &out)?;
            manifest.outputs = outcome.outputs;
            let code = if outcome.unstable {
                eprintln!("aborted: {}", outcome.report.status);
                UNSTABLE
            } else {
                println!("{} diagnostics rows written to {}", outcome.report.records.len(), out.display());
                0
            };
            finish(manifest, &out, start, code)
        }
        Command::Verify { suite, seed, samples, out, perturb } => {
            std::fs::create_dir_all(&out)?;
            let report = verify::run(suite, VerifyOptions { seed, samples, perturb });
            for c in &report.checks {
                println!(
                    "{} {:<10} {:<34} residual {:.3e} (tolerance {:.0e}, {} samples)",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.suite,
                    c.name,
                    c.max_residual,
                    c.tolerance,
                    c.samples
                );
            }
            let path = out.join("verify.json");
            write_json(&path, &report)?;
            let config = serde_json::json!({ "suite": suite, "samples": samples, "perturb": perturb });
            let mut manifest = RunManifest::new("verify", seed, config);
            manifest.outputs.push(path);
            finish(manifest, &out, start, if report.pass { 0 } else { BREACH })
        }
        Command::Diagnose { snapshots, config, mode, seed, samples, out } => {
            let diagnostics = match &config {
                Some(p) => RunConfig::load(p)?.diagnostics,
                None => Default::default(),
            };
            let opts = diagnose::DiagnoseOptions { mode, seed, samples, diagnostics };
            let (report, outputs) = diagnose::run(&snapshots, &opts, &out)?;
            println!("{} snapshots diagnosed; summary {}", report.records.len(), serde_json::to_string(&report.summary)?);
            let config = serde_json::json!({
                "snapshots": snapshots,
                "mode": mode,
                "samples": samples,
                "diagnostics": opts.diagnostics,
            });
            let mut manifest = RunManifest::new("diagnose", seed, config);
            manifest.outputs = outputs;
            finish(manifest, &out, start, 0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors, which would read as a tolerance breach.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let unstable = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<rvn_core::RvnError>(), Some(rvn_core::RvnError::Instability { .. })));
            eprintln!("error: {e:#}");
            ExitCode::from(if unstable { UNSTABLE } else { 1 })
        }
    }
}

