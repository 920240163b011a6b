//! Run manifests and report writers.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use rvn_core::diagnostics::EnergyReport;

/// Written next to every report. Reports themselves carry no wall-clock or
/// path data, so identical inputs give byte-identical reports.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_s: f64,
    pub exit_code: u8,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            outputs: Vec::new(),
            wall_clock_s: 0.0,
            exit_code: 0,
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Meaning of each CSV column.
pub fn column_definitions() -> Vec<(&'static str, &'static str)> {
    vec![
        ("t", "time"),
        ("e_high_f_top", "sum of weighted L² norms of the profile derivatives at the top order"),
        ("e_high_f_lower", "the same sum below the top order"),
        ("e_low_f", "weighted L²_v norms of the x-integrated profile and its v-derivatives, corrected at top order"),
        ("e_high_phi", "dyadic sup and L² norms of the wave profile and its modified profile"),
        ("e_low_phi", "X_n norms (n = 0..3) of the wave profile and its time derivatives, time-weighted"),
        ("field_sup", "sup_x |∂_tφ| + |∇φ|"),
        ("field_weighted", "(1+t) sup_x (1 + ||t| - |x||)(|∂_tφ| + |∇φ|)"),
        ("density_p1", "sup over sampled directions of ∫|f| dv"),
        ("density_p2", "sup over sampled directions of (∫|f|² dv)^(1/2)"),
    ]
}

pub fn write_energy_csv(path: &Path, rows: &[EnergyReport]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(EnergyReport::COLUMNS)?;
    for r in rows {
        w.write_record(r.row().iter().map(|x| format!("{x:e}")))?;
    }
    w.flush()?;
    Ok(())
}
