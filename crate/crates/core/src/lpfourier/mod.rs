//! Periodic-box spectral plumbing and Littlewood–Paley machinery.
//!
//! Transforms follow `F f(ξ) = ∫ e^{−ix·ξ} f(x) dx`; on the lattice every
//! operator acts on raw DFT coefficients, so derivatives have symbol `iξ`.

pub mod cutoff;
mod fft;
mod symbol;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RvnError};
pub use cutoff::CutoffFamily;
use cutoff::{psi_ge, psi_k, psi_le};
pub use fft::Fft3;
pub use symbol::symbol_norm;

pub type C64 = Complex64;

/// A cubic periodic box `[−L, L)³` with `n` points per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub n: [usize; 3],
    pub half_length: f64,
}

impl Grid3 {
    pub fn new(n: [usize; 3], half_length: f64) -> Result<Grid3> {
        if n.contains(&0) {
            return Err(RvnError::Config(format!("grid dimensions must be positive, got {n:?}")));
        }
        if half_length <= 0.0 || !half_length.is_finite() {
            return Err(RvnError::NonPositive(half_length));
        }
        Ok(Grid3 { n, half_length })
    }

    pub fn cube(n: usize, half_length: f64) -> Result<Grid3> {
        Grid3::new([n; 3], half_length)
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_length / self.n[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..3).map(|a| self.spacing(a)).product()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n[1] + j) * self.n[2] + k
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.n[2];
        let j = (idx / self.n[2]) % self.n[1];
        let i = idx / (self.n[1] * self.n[2]);
        [i, j, k]
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -self.half_length + i as f64 * self.spacing(axis)
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let m = self.unravel(idx);
        std::array::from_fn(|a| self.coord(a, m[a]))
    }

    /// Signed integer frequency of DFT bin `i`; the Nyquist bin is positive.
    pub fn freq_index(&self, axis: usize, i: usize) -> i64 {
        let n = self.n[axis] as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn wavenumber(&self, axis: usize, i: usize) -> f64 {
        self.freq_index(axis, i) as f64 * std::f64::consts::PI / self.half_length
    }

    pub fn xi(&self, idx: usize) -> [f64; 3] {
        let m = self.unravel(idx);
        std::array::from_fn(|a| self.wavenumber(a, m[a]))
    }

    /// True if any axis of bin `idx` sits on an (even-length) Nyquist line.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let m = self.unravel(idx);
        (0..3).any(|a| self.n[a] % 2 == 0 && m[a] == self.n[a] / 2)
    }

    /// Bin of `−ξ` for bin `idx`.
    pub fn negate(&self, idx: usize) -> usize {
        let m = self.unravel(idx);
        let r: [usize; 3] = std::array::from_fn(|a| (self.n[a] - m[a]) % self.n[a]);
        self.index(r[0], r[1], r[2])
    }

    pub fn nyquist(&self) -> f64 {
        (0..3).map(|a| self.n[a] as f64 / 2.0).fold(f64::INFINITY, f64::min) * std::f64::consts::PI / self.half_length
    }

    /// Largest `k` with `3/2·2^k` below the Nyquist frequency.
    pub fn max_resolved_band(&self) -> i32 {
        (self.nyquist() / cutoff::SUPPORT).log2().floor() as i32
    }

    /// Smallest band that contains a nonzero lattice frequency.
    pub fn min_band(&self) -> i32 {
        let fundamental = std::f64::consts::PI / self.half_length;
        (fundamental / cutoff::SUPPORT).log2().floor() as i32
    }

    /// Factor turning DFT coefficients into samples of the continuum
    /// transform: `F f(ξ) ≈ phase(ξ)·dx³·DFT(f)(ξ)` with the box origin at `−L`.
    pub fn continuum_factor(&self, idx: usize) -> C64 {
        let xi = self.xi(idx);
        let phase: f64 = xi.iter().sum::<f64>() * self.half_length;
        C64::from_polar(self.cell_volume(), phase)
    }
}

pub fn to_complex(data: &[f64]) -> Vec<C64> {
    data.iter().map(|&v| C64::new(v, 0.0)).collect()
}

pub fn forward(grid: &Grid3, data: &[f64]) -> Vec<C64> {
    let mut d = to_complex(data);
    Fft3::for_grid(grid).forward(&mut d);
    d
}

pub fn inverse_real(grid: &Grid3, hat: &[C64]) -> Vec<f64> {
    let mut d = hat.to_vec();
    Fft3::for_grid(grid).inverse(&mut d);
    d.into_iter().map(|c| c.re).collect()
}

/// Multiply coefficients by `symbol(ξ)`.
pub fn apply_symbol<F>(grid: &Grid3, hat: &[C64], symbol: F) -> Vec<C64>
where
    F: Fn([f64; 3]) -> C64 + Sync,
{
    hat.par_iter().enumerate().map(|(idx, &c)| c * symbol(grid.xi(idx))).collect()
}

fn norm3(xi: [f64; 3]) -> f64 {
    (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
}

fn warn_unresolved(grid: &Grid3, k: i32) {
    if 2f64.powi(k) > grid.nyquist() {
        log::warn!("band 2^{k} exceeds the lattice Nyquist frequency {:.3}", grid.nyquist());
    }
}

/// `P_k`: multiply by `ψ_k(|ξ|)`.
pub fn project(grid: &Grid3, hat: &[C64], k: i32) -> Vec<C64> {
    warn_unresolved(grid, k);
    apply_symbol(grid, hat, |xi| C64::new(psi_k(&norm3(xi), k), 0.0))
}

/// `P_{≤k}`.
pub fn project_le(grid: &Grid3, hat: &[C64], k: i32) -> Vec<C64> {
    apply_symbol(grid, hat, |xi| C64::new(psi_le(&norm3(xi), k), 0.0))
}

/// `P_{≥k}`.
pub fn project_ge(grid: &Grid3, hat: &[C64], k: i32) -> Vec<C64> {
    warn_unresolved(grid, k);
    apply_symbol(grid, hat, |xi| C64::new(psi_ge(&norm3(xi), k), 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RieszKind {
    /// `R_i = ∂_i |∇|⁻¹`, symbol `iξ_i/|ξ|`.
    R,
    /// `Q_i = −R_i |∇|⁻¹`, symbol `−iξ_i/|ξ|²`, so that `∇·Q = Id`.
    Q,
}

/// `R_i` or `Q_i` on DFT coefficients; the zero mode maps to zero.
pub fn riesz_q(grid: &Grid3, hat: &[C64], axis: usize, which: RieszKind) -> Vec<C64> {
    apply_symbol(grid, hat, |xi| {
        let r = norm3(xi);
        if r == 0.0 {
            return C64::new(0.0, 0.0);
        }
        match which {
            RieszKind::R => C64::new(0.0, xi[axis] / r),
            RieszKind::Q => C64::new(0.0, -xi[axis] / (r * r)),
        }
    })
}

/// `∂_axis` with symbol `iξ`; Nyquist lines are zeroed so real fields stay real.
pub fn derivative(grid: &Grid3, hat: &[C64], axis: usize) -> Vec<C64> {
    hat.par_iter()
        .enumerate()
        .map(|(idx, &c)| {
            let m = grid.unravel(idx);
            if grid.n[axis] % 2 == 0 && m[axis] == grid.n[axis] / 2 {
                return C64::new(0.0, 0.0);
            }
            c * C64::new(0.0, grid.wavenumber(axis, m[axis]))
        })
        .collect()
}

/// `e^{−it|∇|}`, an exact isometry of the discrete L² norm.
pub fn half_wave(grid: &Grid3, hat: &[C64], t: f64) -> Vec<C64> {
    apply_symbol(grid, hat, |xi| C64::from_polar(1.0, -t * norm3(xi)))
}

/// Zero every Nyquist line so odd symbols keep real fields real.
pub fn zero_nyquist(grid: &Grid3, hat: &mut [C64]) {
    hat.par_iter_mut().enumerate().for_each(|(idx, c)| {
        if grid.is_nyquist(idx) {
            *c = C64::new(0.0, 0.0);
        }
    });
}

pub fn l2_norm_sq(hat: &[C64]) -> f64 {
    hat.iter().map(|c| c.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &Grid3, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid3::new([8, 12, 10], 3.0).unwrap();
        let f = random_field(&g, 1);
        let hat = forward(&g, &f);
        let back = inverse_real(&g, &hat);
        let err = f.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        let e_x: f64 = f.iter().map(|v| v * v).sum();
        let e_k = l2_norm_sq(&hat) / g.len() as f64;
        assert!((e_x - e_k).abs() < 1e-10 * e_x);
    }

    #[test]
    fn single_mode_projection() {
        let g = Grid3::cube(32, std::f64::consts::PI).unwrap();
        // ξ₀ = (4, 0, 0) = 2², so only bands 1, 2, 3 can see it.
        let f: Vec<f64> = (0..g.len()).map(|i| (4.0 * g.point(i)[0]).cos()).collect();
        let hat = forward(&g, &f);
        let p2 = project(&g, &hat, 2);
        let want = psi_k(&4.0, 2);
        let b = g.index(4, 0, 0);
        assert!((p2[b] - hat[b] * want).norm() < 1e-12 * hat[b].norm());
        assert!(project(&g, &hat, -1).iter().all(|c| c.norm() < 1e-12));
        let p0 = project(&g, &hat, 0);
        assert!(project(&g, &p0, 2).iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn partition_recovers_gaussian() {
        let g = Grid3::cube(32, 8.0).unwrap();
        let f: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp()
            })
            .collect();
        let hat = forward(&g, &f);
        let mut sum = vec![C64::new(0.0, 0.0); g.len()];
        for k in g.min_band() - 1..=g.max_resolved_band() + 2 {
            for (s, p) in sum.iter_mut().zip(project(&g, &hat, k)) {
                *s += p;
            }
        }
        // The zero mode belongs to no band.
        sum[0] = hat[0];
        let err = sum.iter().zip(&hat).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10 * hat[0].norm());
    }

    #[test]
    fn divergence_of_q_is_identity() {
        let g = Grid3::cube(16, 4.0).unwrap();
        let f = random_field(&g, 2);
        let mut hat = forward(&g, &f);
        hat[0] = C64::new(0.0, 0.0);
        let mut div = vec![C64::new(0.0, 0.0); g.len()];
        for a in 0..3 {
            let q = riesz_q(&g, &hat, a, RieszKind::Q);
            let dq = apply_symbol(&g, &q, |xi| C64::new(0.0, xi[a]));
            for (d, v) in div.iter_mut().zip(dq) {
                *d += v;
            }
        }
        let err: f64 = div.iter().zip(&hat).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * l2_norm_sq(&hat).sqrt());
        let mut constant = vec![C64::new(0.0, 0.0); g.len()];
        constant[0] = C64::new(2.0, 0.0);
        assert!(riesz_q(&g, &constant, 1, RieszKind::Q).iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn half_wave_is_isometry() {
        let g = Grid3::cube(16, 5.0).unwrap();
        let hat = forward(&g, &random_field(&g, 3));
        let n0 = l2_norm_sq(&hat);
        let n1 = l2_norm_sq(&half_wave(&g, &hat, 17.3));
        assert!((n0 - n1).abs() <= 1e-12 * n0);
    }

    #[test]
    fn spectral_derivative_of_mode() {
        let g = Grid3::cube(16, std::f64::consts::PI).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|i| (3.0 * g.point(i)[1]).sin()).collect();
        let d = inverse_real(&g, &derivative(&g, &forward(&g, &f), 1));
        for i in 0..g.len() {
            assert!((d[i] - 3.0 * (3.0 * g.point(i)[1]).cos()).abs() < 1e-11);
        }
    }

    #[test]
    fn continuum_transform_of_gaussian() {
        let g = Grid3::cube(32, 10.0).unwrap();
        let f: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp()
            })
            .collect();
        let hat = forward(&g, &f);
        for idx in [0, g.index(1, 0, 0), g.index(2, 3, 1)] {
            let xi = g.xi(idx);
            let r2: f64 = xi.iter().map(|c| c * c).sum();
            let want = (2.0 * std::f64::consts::PI).powf(1.5) * (-r2 / 2.0).exp();
            let got = hat[idx] * g.continuum_factor(idx);
            assert!((got - C64::new(want, 0.0)).norm() < 1e-10);
        }
    }
}
