//! INI run configuration.
//!
//! ```ini
//! [grid]
//! nx = 16
//! nv = 16
//! box_x = 12
//! box_v = 4.5
//!
//! [time]
//! dt = 0.25
//! t_start = 0
//! t_end = 20
//! cadence = 4
//!
//! [physics]
//! mode = coupled        ; free-transport | free-wave | linear-coupled | coupled
//! mass = 1
//! amplitude = 0.01
//! cfl_safety = 2
//!
//! [data]
//! density_width = 1
//! velocity_width = 0.6
//! drift = 0, 0, 0
//! wave_amplitude = 1
//! wave_rate_amplitude = 0
//! wave_width = 1
//!
//! [diagnostics]
//! n_max = 1
//! weight_n0 = 4
//! weight_base_rate = 0.5
//! weight_order_rate = 0.25
//! weight_v_power = 2
//! directions = 8        ; density-scan lattice points per axis, 0 disables
//! snapshots = false     ; write binary snapshots at the cadence
//!
//! [run]
//! seed = 0
//! ```
//!
//! Every key is optional; missing keys keep the defaults above. Unknown
//! sections or keys are errors.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use ini::Ini;
use serde::Serialize;

use rvn_core::diagnostics::WeightSpec;
use rvn_core::solver::{Mode, SimConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsConfig {
    pub n_max: usize,
    pub weight: WeightSpec,
    pub directions: usize,
    pub snapshots: bool,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig { n_max: 1, weight: WeightSpec::default(), directions: 8, snapshots: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunConfig {
    pub sim: SimConfig,
    pub diagnostics: DiagnosticsConfig,
}

pub fn parse_mode(s: &str) -> Result<Mode> {
    Ok(match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "free-transport" => Mode::FreeTransport,
        "free-wave" => Mode::FreeWave,
        "linear-coupled" => Mode::LinearCoupled,
        "coupled" => Mode::Coupled,
        other => bail!("unknown mode '{other}'"),
    })
}

fn num<T: std::str::FromStr>(section: &str, key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.trim().parse::<T>().map_err(|e| anyhow!("[{section}] {key} = '{raw}': {e}"))
}

fn triple(section: &str, key: &str, raw: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = raw.split(',').collect();
    if parts.len() != 3 {
        bail!("[{section}] {key} needs three comma-separated numbers, got '{raw}'");
    }
    Ok([num(section, key, parts[0])?, num(section, key, parts[1])?, num(section, key, parts[2])?])
}

impl RunConfig {
    pub fn from_ini_str(text: &str) -> Result<RunConfig> {
        let ini = Ini::load_from_str(text).context("config is not valid INI")?;
        let mut cfg = RunConfig::default();
        for (section, props) in ini.iter() {
            let name = section.unwrap_or("");
            for (key, raw) in props.iter() {
                // Inline `;` or `#` comments end the value.
                let value = raw.split([';', '#']).next().unwrap_or("").trim();
                cfg.set(name, key, value)?;
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RunConfig::from_ini_str(&text).with_context(|| format!("in {}", path.display()))
    }

    fn set(&mut self, section: &str, key: &str, raw: &str) -> Result<()> {
        let s = &mut self.sim;
        let d = &mut self.diagnostics;
        match (section, key) {
            ("grid", "nx") => s.nx = num(section, key, raw)?,
            ("grid", "nv") => s.nv = num(section, key, raw)?,
            ("grid", "box_x") => s.box_x = num(section, key, raw)?,
            ("grid", "box_v") => s.box_v = num(section, key, raw)?,
            ("time", "dt") => s.dt = num(section, key, raw)?,
            ("time", "t_start") => s.t_start = num(section, key, raw)?,
            ("time", "t_end") => s.t_end = num(section, key, raw)?,
            ("time", "cadence") => s.cadence = num(section, key, raw)?,
            ("physics", "mode") => s.mode = parse_mode(raw)?,
            ("physics", "mass") => s.mass = num(section, key, raw)?,
            ("physics", "amplitude") => s.amplitude = num(section, key, raw)?,
            ("physics", "cfl_safety") => s.cfl_safety = num(section, key, raw)?,
            ("data", "density_width") => s.data.density_width = num(section, key, raw)?,
            ("data", "velocity_width") => s.data.velocity_width = num(section, key, raw)?,
            ("data", "drift") => s.data.drift = triple(section, key, raw)?,
            ("data", "wave_amplitude") => s.data.wave_amplitude = num(section, key, raw)?,
            ("data", "wave_rate_amplitude") => s.data.wave_rate_amplitude = num(section, key, raw)?,
            ("data", "wave_width") => s.data.wave_width = num(section, key, raw)?,
            ("diagnostics", "n_max") => {
                d.n_max = num(section, key, raw)?;
                s.n_max = d.n_max;
            }
            ("diagnostics", "weight_n0") => d.weight.n0 = num(section, key, raw)?,
            ("diagnostics", "weight_base_rate") => d.weight.base_rate = num(section, key, raw)?,
            ("diagnostics", "weight_order_rate") => d.weight.order_rate = num(section, key, raw)?,
            ("diagnostics", "weight_v_power") => d.weight.v_power = num(section, key, raw)?,
            ("diagnostics", "directions") => d.directions = num(section, key, raw)?,
            ("diagnostics", "snapshots") => d.snapshots = num(section, key, raw)?,
            ("run", "seed") => s.seed = num(section, key, raw)?,
            ("", k) => bail!("key '{k}' outside any section"),
            (sec, k) => bail!("unknown key '{k}' in [{sec}]"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_default() {
        assert_eq!(RunConfig::from_ini_str("").unwrap(), RunConfig::default());
    }

    #[test]
    fn keys_override_defaults() {
        let cfg = RunConfig::from_ini_str(
            "[grid]\nnx = 8 ; per axis\n[physics]\nmode = free_transport\n[data]\ndrift = 0.5, 0, -0.25\n[diagnostics]\nsnapshots = true\n",
        )
        .unwrap();
        assert_eq!(cfg.sim.nx, 8);
        assert_eq!(cfg.sim.mode, Mode::FreeTransport);
        assert_eq!(cfg.sim.data.drift, [0.5, 0.0, -0.25]);
        assert!(cfg.diagnostics.snapshots);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::from_ini_str("[grid]\nnz = 3\n").is_err());
        assert!(RunConfig::from_ini_str("[grid]\nnx = many\n").is_err());
        assert!(RunConfig::from_ini_str("[physics]\nmode = static\n").is_err());
        assert!(RunConfig::from_ini_str("[data]\ndrift = 1, 2\n").is_err());
    }
}
