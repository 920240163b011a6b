//! Least-squares power-law fits on log–log data.

use serde::Serialize;

use crate::error::{Result, RvnError};

/// Minimum number of samples a fit accepts.
pub const MIN_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `ln(value)`.
    pub residual: f64,
    pub points: usize,
}

/// Fit `ln value = intercept + slope·ln t` over samples with `t` inside
/// `window` (inclusive). The retained samples must number at least
/// [`MIN_POINTS`] and span a factor of ten in `t`.
pub fn slope_fit(series: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<SlopeFit> {
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut pts = Vec::with_capacity(series.len());
    for &(t, y) in series.iter().filter(|(t, _)| *t >= lo && *t <= hi) {
        if t <= 0.0 {
            return Err(RvnError::NonPositive(t));
        }
        if y <= 0.0 || !y.is_finite() {
            return Err(RvnError::NonPositive(y));
        }
        pts.push((t.ln(), y.ln()));
    }
    let span = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max) - pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    if pts.len() < MIN_POINTS || span < 10f64.ln() - 1e-12 {
        return Err(RvnError::InsufficientSeries { need: MIN_POINTS, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit { slope, stderr, intercept, residual: (sse / n).sqrt(), points: pts.len() })
}

/// `n` log-spaced times covering `[a, b]`.
pub fn log_times(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp()).collect()
}
