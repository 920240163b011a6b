//! Frequency-side norms of the half-wave profile and the modified profile.
//!
//! Continuum transforms are approximated by `dx³·DFT`; `∇_ξⁿ` of a profile
//! is the transform of `(−ix)ⁿ` times the physical profile, and vector or
//! tensor values are measured in the Frobenius norm.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::lpfourier::cutoff::psi_k;
use crate::lpfourier::{Fft3, Grid3, C64};
use crate::profiles::{density_hat, modified_profile, CorrectionTerm, DistributionGrid, WaveState};
use crate::solver::{Mode, Snapshot};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Sorted axis tuples of length `n` with the number of orderings of each.
pub(crate) fn monomials(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if cur.len() == n {
            let mut counts = [0usize; 3];
            for &a in cur.iter() {
                counts[a] += 1;
            }
            let fact = |k: usize| (1..=k).product::<usize>() as f64;
            let mult = fact(n) / counts.iter().map(|&c| fact(c)).product::<f64>();
            out.push((cur.clone(), mult));
            return;
        }
        for a in start..3 {
            cur.push(a);
            rec(n, a, cur, out);
            cur.pop();
        }
    }
    rec(n, 0, &mut cur, &mut out);
    out
}

/// `|∇_ξⁿ F|²` at every lattice frequency for the continuum transform `F`
/// whose raw lattice coefficients are `hat`.
fn xi_derivative_sq(grid: &Grid3, fft: &Fft3, hat: &[C64], n: usize) -> Vec<f64> {
    let c2 = grid.cell_volume().powi(2);
    if n == 0 {
        return hat.iter().map(|h| h.norm_sqr() * c2).collect();
    }
    let mut phys = hat.to_vec();
    fft.inverse(&mut phys);
    let points: Vec<[f64; 3]> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let mut out = vec![0.0; grid.len()];
    for (axes, mult) in monomials(n) {
        let mut buf: Vec<C64> = phys
            .iter()
            .zip(&points)
            .map(|(h, x)| {
                let m: f64 = axes.iter().map(|&a| x[a]).product();
                *h * m
            })
            .collect();
        fft.forward(&mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o += mult * b.norm_sqr() * c2;
        }
    }
    out
}

/// `sup_k 2^{(n+1)k} sup_ξ |value(ξ)| ψ_k(|ξ|)` over resolvable bands, with
/// `value_sq` holding squared magnitudes.
fn x_norm(grid: &Grid3, value_sq: &[f64], n: usize) -> f64 {
    let radii: Vec<f64> = (0..grid.len()).map(|i| norm3(grid.xi(i))).collect();
    (grid.min_band()..=grid.max_resolved_band())
        .map(|k| {
            let sup = radii
                .iter()
                .zip(value_sq)
                .map(|(&r, &v)| psi_k(&r, k) * v.sqrt())
                .fold(0.0, f64::max);
            2f64.powi((n as i32 + 1) * k) * sup
        })
        .fold(0.0, f64::max)
}

/// Volume of one lattice cell in frequency space.
fn xi_cell(grid: &Grid3) -> f64 {
    (std::f64::consts::PI / grid.half_length).powi(3)
}

fn l2_xi(grid: &Grid3, value_sq: &[f64]) -> f64 {
    (value_sq.iter().sum::<f64>() * xi_cell(grid)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveEnergy {
    pub high: f64,
    pub low: f64,
    pub terms: Vec<(String, f64)>,
}

/// Raw lattice coefficients of `∂_t h = e^{it|∇|}ρ` for a physical density.
pub fn profile_rate_hat(f: &DistributionGrid, t: f64) -> Vec<C64> {
    let weight: Vec<f64> = (0..f.v.len())
        .map(|iv| {
            let v = f.v.node(iv);
            1.0 / (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
        })
        .collect();
    let rho = density_hat(f, &weight);
    rho.iter().enumerate().map(|(i, r)| C64::from_polar(1.0, t * norm3(f.x.xi(i))) * r).collect()
}

/// `(E_high^φ, E_low^φ)` for the zeroth-order profile.
///
/// * `h_tilde` is `None` when no kinetic profile corrects `h`.
/// * `rate` holds `∂_t ĥ` (raw coefficients), `None` for the free wave.
pub fn energy_phi_parts(wave: &WaveState, h_tilde: Option<&[C64]>, rate: Option<&[C64]>) -> WaveEnergy {
    let grid = wave.grid;
    let fft = Fft3::for_grid(&grid);
    let t = wave.t;
    let h = wave.h_hat();
    let ht: Vec<C64> = h_tilde.map_or_else(|| h.clone(), |v| v.to_vec());
    let radii: Vec<f64> = (0..grid.len()).map(|i| norm3(grid.xi(i))).collect();

    let h_sq = xi_derivative_sq(&grid, &fft, &h, 0);
    let ht_sq = xi_derivative_sq(&grid, &fft, &ht, 0);
    let dht_sq = xi_derivative_sq(&grid, &fft, &ht, 1);
    let band = (grid.min_band()..=grid.max_resolved_band())
        .map(|k| {
            let s = 2f64.powi(k);
            let mut sup_h = 0.0f64;
            let mut sup_ht = 0.0f64;
            let mut l2 = 0.0;
            for i in 0..grid.len() {
                let p = psi_k(&radii[i], k);
                if p == 0.0 {
                    continue;
                }
                sup_h = sup_h.max(p * h_sq[i].sqrt());
                sup_ht = sup_ht.max(p * ht_sq[i].sqrt());
                l2 += p * p * dht_sq[i];
            }
            s * sup_h + s * sup_ht + s.sqrt() * (l2 * xi_cell(&grid)).sqrt()
        })
        .fold(0.0, f64::max);
    let l2_h = l2_xi(&grid, &h_sq);
    let l2_ht = l2_xi(&grid, &ht_sq);
    let high = band + l2_h + l2_ht;

    let mut terms = vec![("high_band".to_string(), band), ("high_l2_h".into(), l2_h), ("high_l2_htilde".into(), l2_ht)];
    let zero = vec![ZERO; grid.len()];
    let dh = rate.unwrap_or(&zero);
    let grad_dh: Vec<Vec<C64>> = (0..3)
        .map(|a| {
            dh.iter()
                .enumerate()
                .map(|(i, c)| {
                    let xi = grid.xi(i);
                    *c * C64::new(0.0, xi[a] / (1.0 + radii[i]))
                })
                .collect()
        })
        .collect();
    let low_parts: Vec<(f64, f64, f64)> = (0..=3usize)
        .into_par_iter()
        .map(|n| {
            let a = x_norm(&grid, &xi_derivative_sq(&grid, &fft, &h, n), n);
            let b = x_norm(&grid, &xi_derivative_sq(&grid, &fft, dh, n), n);
            let mut sq = vec![0.0; grid.len()];
            for comp in &grad_dh {
                for (s, v) in sq.iter_mut().zip(xi_derivative_sq(&grid, &fft, comp, n)) {
                    *s += v;
                }
            }
            let c = x_norm(&grid, &sq, n);
            (a, b, c)
        })
        .collect();
    let mut low = 0.0;
    for (n, (a, b, c)) in low_parts.into_iter().enumerate() {
        low += a + (1.0 + t.abs()) * b + (1.0 + t.abs()).powi(2) * c;
        terms.push((format!("X{n}_h"), a));
        terms.push((format!("X{n}_dth"), b));
        terms.push((format!("X{n}_dtgradh"), c));
    }
    WaveEnergy { high, low, terms }
}

/// Wave energies of a snapshot. When `mode` couples a unit-mass density to
/// the wave, `h̃` is corrected by the kinetic profile and `∂_t h` is the
/// density source; otherwise `h̃ = h` and `∂_t h = 0`.
pub fn energy_phi(snap: &mut Snapshot, mode: Mode) -> Result<WaveEnergy> {
    let t = snap.t;
    let sourced = matches!(mode, Mode::LinearCoupled | Mode::Coupled) && snap.mass == 1.0;
    let rate = if sourced { Some(profile_rate_hat(&snap.f, t)) } else { None };
    let wave = snap.wave.clone();
    let h_tilde = if sourced && !snap.f.is_zero() {
        let g = snap.profile();
        Some(modified_profile(&wave.grid, &wave.h_hat(), &[CorrectionTerm::base(g)], t)?)
    } else {
        None
    };
    Ok(energy_phi_parts(&wave, h_tilde.as_deref(), rate.as_deref()))
}
