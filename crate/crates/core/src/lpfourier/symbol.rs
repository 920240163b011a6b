//! Quadrature estimate of the dyadic symbol norm
//! `Σ_{|α|≤cap} 2^{|α|k} ‖F⁻¹[∂^α m · ψ_k]‖_{L¹}`.
//!
//! By dilation this equals the same sum for `m_k(ζ) = m(2^k ζ)` on band 0,
//! so every band is evaluated on one fixed lattice `ζ ∈ [−2, 2)³`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::cutoff::psi_k;
use super::fft::Fft3;

const POINTS: usize = 64;
const HALF_WIDTH: f64 = 2.0;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Multi-indices of total order `≤ cap`.
fn multi_indices(cap: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..=cap {
        for b in 0..=cap - a {
            for c in 0..=cap - a - b {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Central difference `∂^α f(ζ)` with step `h` (half-integer offsets for odd orders).
fn central_partial<F: Fn(&[f64; 3]) -> f64>(f: &F, z: [f64; 3], alpha: [usize; 3], h: f64) -> f64 {
    let mut acc = 0.0;
    for a in 0..=alpha[0] {
        for b in 0..=alpha[1] {
            for c in 0..=alpha[2] {
                let w = binomial(alpha[0], a) * binomial(alpha[1], b) * binomial(alpha[2], c);
                let sign = if (a + b + c) % 2 == 0 { 1.0 } else { -1.0 };
                let p = [
                    z[0] + (alpha[0] as f64 / 2.0 - a as f64) * h,
                    z[1] + (alpha[1] as f64 / 2.0 - b as f64) * h,
                    z[2] + (alpha[2] as f64 / 2.0 - c as f64) * h,
                ];
                acc += sign * w * f(&p);
            }
        }
    }
    acc / h.powi((alpha[0] + alpha[1] + alpha[2]) as i32)
}

/// Symbol norm of `m` on band `k`, summed over derivative orders `≤ cap`.
pub fn symbol_norm<F>(m: F, k: i32, cap: usize) -> f64
where
    F: Fn(&[f64; 3]) -> f64 + Sync,
{
    let scale = 2f64.powi(k);
    let mk = |z: &[f64; 3]| m(&[z[0] * scale, z[1] * scale, z[2] * scale]);
    let n = POINTS;
    let h = 2.0 * HALF_WIDTH / n as f64;
    let coord = |i: usize| -HALF_WIDTH + i as f64 * h;
    let len = n * n * n;
    let fft = Fft3::new([n; 3]);
    // Inverse continuum transform: (2π)^{-3} h³ Σ e^{ix·ζ}; the x-cell is (2π/(n h))³.
    let dx3 = (2.0 * std::f64::consts::PI / (n as f64 * h)).powi(3);
    let norm = h.powi(3) / (2.0 * std::f64::consts::PI).powi(3) * dx3;
    multi_indices(cap)
        .into_iter()
        .map(|alpha| {
            let mut buf: Vec<Complex64> = (0..len)
                .into_par_iter()
                .map(|idx| {
                    let z = [coord(idx / (n * n)), coord((idx / n) % n), coord(idx % n)];
                    let r = (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]).sqrt();
                    let cut = psi_k(&r, 0);
                    if cut == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    Complex64::new(cut * central_partial(&mk, z, alpha, h), 0.0)
                })
                .collect();
            // Unnormalized transform; only moduli are summed, so the sign of
            // the exponent and the lattice origin do not matter.
            fft.forward(&mut buf);
            buf.iter().map(|c| c.norm()).sum::<f64>() * norm
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_symbol_is_band_independent() {
        let a = symbol_norm(|_| 1.0, 0, 0);
        let b = symbol_norm(|_| 1.0, 5, 0);
        let c = symbol_norm(|_| 1.0, -3, 0);
        assert!(a > 0.5 && a.is_finite());
        assert!((a - b).abs() < 1e-12 * a && (a - c).abs() < 1e-12 * a);
    }

    #[test]
    fn order_zero_symbol_is_uniform() {
        let m = |x: &[f64; 3]| x[0] / (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let vals: Vec<f64> = [-2, 0, 3].iter().map(|&k| symbol_norm(m, k, 2)).collect();
        let (lo, hi) = vals.iter().fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!((hi - lo) / lo < 0.1, "{vals:?}");
    }

    #[test]
    fn homogeneous_symbol_scales() {
        let m = |x: &[f64; 3]| (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let ks = [0, 1, 2, 3];
        let logs: Vec<f64> = ks.iter().map(|&k| symbol_norm(m, k, 1).log2()).collect();
        let slope = (logs[3] - logs[0]) / 3.0;
        assert!((slope - 1.0).abs() < 0.05, "{slope}");
    }
}
