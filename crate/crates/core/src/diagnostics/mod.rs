//! Weighted energies, pointwise decay scans and the weight-ratio check.

mod energy_f;
mod energy_phi;
mod scans;
mod weight;

use serde::Serialize;

pub use energy_f::{
    energy_high_f, energy_high_f_profile, energy_low_f, profile_rate, FieldTerm, HighEnergy, LowEnergy,
    LowEnergyAccumulator, MAX_ORDER,
};
pub use energy_phi::{energy_phi, energy_phi_parts, profile_rate_hat, WaveEnergy};
pub use scans::{
    decay_scan_field, density_decay_fit, density_decay_scan, density_sup, direction_lattice, field_decay_fit,
    DensityRow, FieldDecayRow,
};
pub use weight::{weight_ratio_check, WeightRatioReport, WeightSpec};

use crate::error::Result;
use crate::solver::{Mode, Snapshot};

/// One row of a diagnostics time series.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    pub e_high_f_top: f64,
    pub e_high_f_lower: f64,
    pub e_low_f: f64,
    pub e_high_phi: f64,
    pub e_low_phi: f64,
    pub field_sup: f64,
    pub field_weighted: f64,
    pub density_p1: f64,
    pub density_p2: f64,
    /// Individual contributions, keyed by term name.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<(String, f64)>,
}

impl EnergyReport {
    /// Column names of [`EnergyReport::row`].
    pub const COLUMNS: [&'static str; 10] = [
        "t",
        "e_high_f_top",
        "e_high_f_lower",
        "e_low_f",
        "e_high_phi",
        "e_low_phi",
        "field_sup",
        "field_weighted",
        "density_p1",
        "density_p2",
    ];

    /// Scalar columns in [`EnergyReport::COLUMNS`] order.
    pub fn row(&self) -> [f64; 10] {
        [
            self.t,
            self.e_high_f_top,
            self.e_high_f_lower,
            self.e_low_f,
            self.e_high_phi,
            self.e_low_phi,
            self.field_sup,
            self.field_weighted,
            self.density_p1,
            self.density_p2,
        ]
    }
}

/// Every diagnostic of one snapshot. The density columns stay zero at
/// `t ≤ 0` or when `directions` is empty.
pub fn energy_report(
    snap: &mut Snapshot,
    spec: &WeightSpec,
    n_max: usize,
    mode: Mode,
    acc: Option<&LowEnergyAccumulator>,
    directions: &[[f64; 3]],
) -> Result<EnergyReport> {
    let t = snap.t;
    let high = energy_high_f(snap, spec, n_max, mode)?;
    let low = energy_low_f(snap.profile(), acc, spec, n_max)?;
    let phi = energy_phi(snap, mode)?;
    let field = decay_scan_field(&snap.wave, 0)?;
    let density = if t > 0.0 && !directions.is_empty() {
        density_sup(snap.profile(), t, 0, directions)?
    } else {
        DensityRow { t, p1: 0.0, p2: 0.0 }
    };
    let mut terms: Vec<(String, f64)> = high.terms.into_iter().map(|(k, v)| (format!("f_high.{k}"), v)).collect();
    terms.extend(low.terms.into_iter().map(|(k, v)| (format!("f_low.{k}"), v)));
    terms.extend(phi.terms.into_iter().map(|(k, v)| (format!("phi.{k}"), v)));
    Ok(EnergyReport {
        t,
        e_high_f_top: high.top,
        e_high_f_lower: high.lower,
        e_low_f: low.total,
        e_high_phi: phi.high,
        e_low_phi: phi.low,
        field_sup: field.sup,
        field_weighted: field.weighted,
        density_p1: density.p1,
        density_p2: density.p2,
        terms,
    })
}
