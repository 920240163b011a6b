//! Smooth radial cutoffs and the dyadic partition built from them.
//!
//! The base profile equals 1 on `|r| <= 5/4`, vanishes on `|r| >= 3/2` and
//! is C^∞ in between (exponential gluing, so every derivative is bounded and
//! nested finite differences of coefficients stay accurate).

use crate::jet::Real;

pub const PLATEAU: f64 = 1.25;
pub const SUPPORT: f64 = 1.5;

/// The base profile evaluated on any [`Real`]; plateau regions return exact
/// constants so downstream products short-circuit to exact zeros.
pub fn base_profile<R: Real>(r: &R) -> R {
    let a = r.value().abs();
    if a <= PLATEAU {
        return r.cst(1.0);
    }
    if a >= SUPPORT {
        return r.cst(0.0);
    }
    let ar = if r.value() < 0.0 { -r.clone() } else { r.clone() };
    let s = (ar - PLATEAU) * (1.0 / (SUPPORT - PLATEAU));
    let left = (-s.recip()).exp();
    let right = (-(-s + 1.0).recip()).exp();
    right.clone() / (left + right)
}

fn scale(k: i32) -> f64 {
    2f64.powi(k)
}

/// `ψ_{≤k}(r) = ψ̃(r / 2^k)`.
pub fn psi_le<R: Real>(r: &R, k: i32) -> R {
    base_profile(&(r.clone() * (1.0 / scale(k))))
}

/// `ψ_{≥k}(r) = 1 − ψ̃(r / 2^{k−1})`.
pub fn psi_ge<R: Real>(r: &R, k: i32) -> R {
    // On the plateau `inner` is the exact constant 1, so this is an exact 0.
    -base_profile(&(r.clone() * (1.0 / scale(k - 1)))) + 1.0
}

/// `ψ_k(r) = ψ̃(r / 2^k) − ψ̃(r / 2^{k−1})`.
pub fn psi_k<R: Real>(r: &R, k: i32) -> R {
    psi_le(r, k) - psi_le(r, k - 1)
}

/// The dyadic family as a value type, for callers that pass it around.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CutoffFamily;

impl CutoffFamily {
    pub fn base(&self, r: f64) -> f64 {
        base_profile(&r)
    }
    pub fn band(&self, r: f64, k: i32) -> f64 {
        psi_k(&r, k)
    }
    pub fn low(&self, r: f64, k: i32) -> f64 {
        psi_le(&r, k)
    }
    pub fn high(&self, r: f64, k: i32) -> f64 {
        psi_ge(&r, k)
    }
    /// Smallest `k` whose band touches radius `r` (support `[5/8·2^k, 3/2·2^k]`).
    pub fn lowest_band_touching(&self, r: f64) -> i32 {
        (r / SUPPORT).log2().floor() as i32
    }
    /// Bands `k` with `ψ_k(r) != 0`.
    pub fn bands_at(&self, r: f64) -> Vec<i32> {
        if r <= 0.0 {
            return Vec::new();
        }
        let lo = self.lowest_band_touching(r) - 1;
        (lo..lo + 4).filter(|&k| psi_k(&r, k) != 0.0).collect()
    }
}
