//! `rvn simulate`: run the solver and stream diagnostics at the cadence.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use rvn_core::diagnostics::{
    direction_lattice, energy_report, field_decay_fit, EnergyReport, FieldDecayRow, LowEnergyAccumulator,
};
use rvn_core::oracle::{slope_fit, SlopeFit};
use rvn_core::profiles::to_profile;
use rvn_core::solver::Simulation;
use rvn_core::RvnError;

use crate::config::RunConfig;
use crate::report::{column_definitions, write_energy_csv, write_json};

/// A fit, or why it could not be made.
#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fit {
    Slope(SlopeFit),
    Unavailable(String),
}

impl Fit {
    pub fn from(r: rvn_core::Result<SlopeFit>) -> Fit {
        match r {
            Ok(f) => Fit::Slope(f),
            Err(e) => Fit::Unavailable(e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Fits {
    /// Log-log slope of `field_sup`.
    pub field_decay: Fit,
    /// Log-log slopes of the density columns.
    pub density_p1: Fit,
    pub density_p2: Fit,
    /// Growth exponents of `e_high_f_top + e_high_f_lower` and `e_high_phi`.
    pub growth_high_f: Fit,
    pub growth_high_phi: Fit,
}

impl Fits {
    pub fn of(rows: &[EnergyReport]) -> Fits {
        let positive: Vec<&EnergyReport> = rows.iter().filter(|r| r.t > 0.0).collect();
        let series = |col: fn(&EnergyReport) -> f64| positive.iter().map(|r| (r.t, col(r))).collect::<Vec<_>>();
        let field: Vec<FieldDecayRow> =
            positive.iter().map(|r| FieldDecayRow { t: r.t, sup: r.field_sup, weighted: r.field_weighted }).collect();
        Fits {
            field_decay: Fit::from(field_decay_fit(&field, None)),
            density_p1: Fit::from(slope_fit(&series(|r| r.density_p1), None)),
            density_p2: Fit::from(slope_fit(&series(|r| r.density_p2), None)),
            growth_high_f: Fit::from(slope_fit(&series(|r| r.e_high_f_top + r.e_high_f_lower), None)),
            growth_high_phi: Fit::from(slope_fit(&series(|r| r.e_high_phi), None)),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulationReport {
    pub config: RunConfig,
    pub status: String,
    pub steps: usize,
    /// Characteristic feet that left the velocity box.
    pub clamped: u64,
    pub definitions: Vec<(&'static str, &'static str)>,
    pub records: Vec<EnergyReport>,
    pub fits: Fits,
}

pub struct Outcome {
    pub report: SimulationReport,
    pub outputs: Vec<PathBuf>,
    pub unstable: bool,
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let snap_dir = out.join("snapshots");
    if cfg.diagnostics.snapshots {
        fs::create_dir_all(&snap_dir)?;
    }
    let mut sim = Simulation::new(cfg.sim.clone())?;
    let directions = direction_lattice(&sim.f.v, cfg.diagnostics.directions);
    let n_max = cfg.diagnostics.n_max;
    let mode = cfg.sim.mode;
    let mut acc = LowEnergyAccumulator::new(n_max)?;
    let mut records = Vec::new();
    let mut outputs = Vec::new();
    let result = sim.run(|view| {
        if view.mass == 1.0 {
            acc.record(&to_profile(view.f, view.t), view.wave, view.t);
        }
        if !view.emit {
            return Ok(());
        }
        let mut snap = view.snapshot();
        if cfg.diagnostics.snapshots {
            let path = snap_dir.join(format!("snap_{:06}.rvn", view.step));
            snap.save(&path)?;
            outputs.push(path);
        }
        let report = energy_report(&mut snap, &cfg.diagnostics.weight, n_max, mode, Some(&acc), &directions)?;
        log::info!("t = {:.3}: E_high^f = {:.4e}, E_high^φ = {:.4e}", report.t, report.e_high_f_top, report.e_high_phi);
        records.push(report);
        Ok(())
    });
    let (status, unstable) = match result {
        Ok(()) => ("completed".to_string(), false),
        Err(e @ RvnError::Instability { .. }) => (e.to_string(), true),
        Err(e) => return Err(e.into()),
    };
    let csv_path = out.join("energies.csv");
    write_energy_csv(&csv_path, &records)?;
    let report = SimulationReport {
        config: cfg.clone(),
        status,
        steps: sim.step_count,
        clamped: sim.clamped,
        definitions: column_definitions(),
        fits: Fits::of(&records),
        records,
    };
    let json_path = out.join("report.json");
    write_json(&json_path, &report)?;
    outputs.push(csv_path);
    outputs.push(json_path);
    Ok(Outcome { report, outputs, unstable })
}
