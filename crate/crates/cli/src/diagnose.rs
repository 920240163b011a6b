//! `rvn diagnose`: scans, fits and the weight-ratio check over saved snapshots.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use rvn_core::diagnostics::{direction_lattice, energy_report, weight_ratio_check, EnergyReport, WeightRatioReport};
use rvn_core::solver::{Mode, Snapshot};

use crate::config::DiagnosticsConfig;
use crate::report::{column_definitions, write_energy_csv, write_json};
use crate::simulate::Fits;

#[derive(Debug, Serialize)]
pub struct Summary {
    /// Largest weighted field value over its value at the earliest positive time.
    pub weighted_field_ratio: Option<f64>,
    /// Weighted field stays within 3× of its first value.
    pub bounded_weighted_decay: Option<bool>,
    /// Both high energies grow with fitted exponent at most 0.1.
    pub subpolynomial_energy: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct DiagnoseReport {
    pub mode: Mode,
    pub snapshots: Vec<PathBuf>,
    pub definitions: Vec<(&'static str, &'static str)>,
    pub records: Vec<EnergyReport>,
    pub fits: Fits,
    pub weight_ratio: WeightRatioReport,
    pub summary: Summary,
}

pub struct DiagnoseOptions {
    pub mode: Mode,
    pub seed: u64,
    pub samples: usize,
    pub diagnostics: DiagnosticsConfig,
}

fn summarize(records: &[EnergyReport], fits: &Fits) -> Summary {
    let positive: Vec<&EnergyReport> = records.iter().filter(|r| r.t > 0.0).collect();
    let ratio = positive.first().and_then(|first| {
        let peak = positive.iter().map(|r| r.field_weighted).fold(0.0, f64::max);
        (first.field_weighted > 0.0).then(|| peak / first.field_weighted)
    });
    let growth = |f: &crate::simulate::Fit| match f {
        crate::simulate::Fit::Slope(s) => Some(s.slope <= 0.1),
        crate::simulate::Fit::Unavailable(_) => None,
    };
    let subpolynomial = match (growth(&fits.growth_high_f), growth(&fits.growth_high_phi)) {
        (Some(a), Some(b)) => Some(a && b),
        _ => None,
    };
    Summary { weighted_field_ratio: ratio, bounded_weighted_decay: ratio.map(|r| r <= 3.0), subpolynomial_energy: subpolynomial }
}

pub fn run(pattern: &str, opts: &DiagnoseOptions, out: &Path) -> Result<(DiagnoseReport, Vec<PathBuf>)> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .with_context(|| format!("bad snapshot pattern '{pattern}'"))?
        .collect::<std::result::Result<_, _>>()?;
    paths.sort();
    if paths.is_empty() {
        bail!("no snapshots match '{pattern}'");
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let d = &opts.diagnostics;
    let mut records = Vec::new();
    for path in &paths {
        let mut snap = Snapshot::load(path).with_context(|| format!("reading {}", path.display()))?;
        let directions = direction_lattice(&snap.f.v, d.directions);
        // Without the run history the low-energy correction is unavailable.
        let r = energy_report(&mut snap, &d.weight, d.n_max, opts.mode, None, &directions)?;
        records.push(r);
    }
    records.sort_by(|a, b| a.t.total_cmp(&b.t));
    let fits = Fits::of(&records);
    let summary = summarize(&records, &fits);
    let weight_ratio = weight_ratio_check(&d.weight, &[1.0, 10.0, 100.0, 1000.0], opts.samples, 4.0, d.n_max, opts.seed);
    let report = DiagnoseReport {
        mode: opts.mode,
        snapshots: paths,
        definitions: column_definitions(),
        records,
        fits,
        weight_ratio,
        summary,
    };
    let csv_path = out.join("diagnose.csv");
    write_energy_csv(&csv_path, &report.records)?;
    let json_path = out.join("diagnose.json");
    write_json(&json_path, &report)?;
    Ok((report, vec![csv_path, json_path]))
}
