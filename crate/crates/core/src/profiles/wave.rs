//! Wave fields, half-wave profiles and the profile-side evolution.
//!
//! Spectral quantities are raw DFT coefficients on the spatial lattice.
//! Velocity integrals are midpoint sums over the `VGrid` nodes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{blocked_sum, relativistic_velocity, DistributionGrid, Representation};
use crate::error::{Result, RvnError};
use crate::lpfourier::{forward, inverse_real, Fft3, Grid3, C64};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// The scalar field `φ` and `∂_tφ` at time `t`, held spectrally.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveState {
    pub grid: Grid3,
    pub t: f64,
    pub phi_hat: Vec<C64>,
    pub dphi_hat: Vec<C64>,
}

impl WaveState {
    pub fn zeros(grid: Grid3, t: f64) -> WaveState {
        WaveState { grid, t, phi_hat: vec![ZERO; grid.len()], dphi_hat: vec![ZERO; grid.len()] }
    }

    pub fn from_physical(grid: Grid3, t: f64, phi: &[f64], dphi: &[f64]) -> Result<WaveState> {
        if phi.len() != grid.len() || dphi.len() != grid.len() {
            return Err(RvnError::Config(format!(
                "wave data has {} / {} values, grid needs {}",
                phi.len(),
                dphi.len(),
                grid.len()
            )));
        }
        Ok(WaveState { grid, t, phi_hat: forward(&grid, phi), dphi_hat: forward(&grid, dphi) })
    }

    pub fn phi(&self) -> Vec<f64> {
        inverse_real(&self.grid, &self.phi_hat)
    }

    pub fn dphi(&self) -> Vec<f64> {
        inverse_real(&self.grid, &self.dphi_hat)
    }

    pub fn grad_phi_hat(&self, axis: usize) -> Vec<C64> {
        crate::lpfourier::derivative(&self.grid, &self.phi_hat, axis)
    }

    /// `û = ∂_tφ̂ − i|ξ|φ̂`.
    pub fn u_hat(&self) -> Vec<C64> {
        (0..self.grid.len())
            .map(|i| self.dphi_hat[i] - I * norm3(self.grid.xi(i)) * self.phi_hat[i])
            .collect()
    }

    /// The half-wave profile `ĥ = e^{it|ξ|}û`.
    pub fn h_hat(&self) -> Vec<C64> {
        let u = self.u_hat();
        (0..self.grid.len()).map(|i| C64::from_polar(1.0, self.t * norm3(self.grid.xi(i))) * u[i]).collect()
    }

    /// Inverts `u = ∂_tφ − i|∇|φ` for real fields; `phi0` supplies the
    /// zero mode of `φ̂`, which `u` does not see.
    pub fn from_u_hat(grid: Grid3, t: f64, u_hat: &[C64], phi0: C64) -> WaveState {
        let n = grid.len();
        let mut phi_hat = vec![ZERO; n];
        let mut dphi_hat = vec![ZERO; n];
        for i in 0..n {
            let mirror = u_hat[grid.negate(i)].conj();
            dphi_hat[i] = 0.5 * (u_hat[i] + mirror);
            let r = norm3(grid.xi(i));
            phi_hat[i] = if r == 0.0 { phi0 } else { (mirror - u_hat[i]) / (2.0 * I * r) };
        }
        WaveState { grid, t, phi_hat, dphi_hat }
    }

    /// `½∫ |∂_tφ|² + |∇φ|² dx`.
    pub fn energy(&self) -> f64 {
        let u = self.u_hat();
        0.5 * u.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.cell_volume() / self.grid.len() as f64
    }
}

/// One velocity-weighted family entering the modified profile: the sum
/// `Σ_v W ã(v) e^{it(|ξ|−v̂·ξ)} i/(|ξ|−v̂·ξ) ĝ(ξ, v)`.
#[derive(Clone, Debug)]
pub struct CorrectionTerm<'a> {
    /// `ã` at every velocity node.
    pub weight: Vec<f64>,
    pub g: &'a DistributionGrid,
}

impl<'a> CorrectionTerm<'a> {
    /// The undifferentiated term with `ã = 1/√(1+|v|²)`.
    pub fn base(g: &'a DistributionGrid) -> Self {
        let weight = (0..g.v.len())
            .map(|iv| {
                let v = g.v.node(iv);
                1.0 / (1.0 + dot3(v, v)).sqrt()
            })
            .collect();
        CorrectionTerm { weight, g }
    }
}

/// `Σ_terms Σ_v W · kernel(ξ, v̂) · ã · ĝ(ξ, v)`; the kernel returns `None`
/// where the term vanishes.
fn velocity_sum<K>(grid: &Grid3, terms: &[CorrectionTerm], kernel: K) -> Vec<C64>
where
    K: Fn([f64; 3], [f64; 3]) -> Option<C64> + Sync,
{
    let n = grid.len();
    let xi: Vec<[f64; 3]> = (0..n).map(|i| grid.xi(i)).collect();
    let fft = Fft3::for_grid(grid);
    let mut acc = vec![ZERO; n];
    for term in terms {
        assert_eq!(term.g.x, *grid, "profile lattice differs from the wave lattice");
        let w = term.g.v.weight();
        let part = blocked_sum(term.g.v.len(), n, |iv, local| {
            if term.weight[iv] == 0.0 {
                return;
            }
            let vh = relativistic_velocity(term.g.v.node(iv), 1.0);
            let mut buf: Vec<C64> = term.g.slab(iv).iter().map(|&v| C64::new(v, 0.0)).collect();
            fft.forward(&mut buf);
            let c = w * term.weight[iv];
            for i in 0..n {
                if grid.is_nyquist(i) {
                    continue;
                }
                if let Some(k) = kernel(xi[i], vh) {
                    local[i] += c * k * buf[i];
                }
            }
        });
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    acc
}

/// Phase gap `|ξ| − v̂·ξ`, positive off the origin since `|v̂| < 1`.
fn gap(xi: [f64; 3], vh: [f64; 3]) -> Option<f64> {
    let r = norm3(xi);
    if r == 0.0 {
        return None;
    }
    Some(r - dot3(vh, xi))
}

/// The phase gap degenerates once `|v̂|` approaches the light speed.
const RESONANCE_MARGIN: f64 = 1e-6;

fn check_nonresonant(terms: &[CorrectionTerm]) -> Result<()> {
    for term in terms {
        // The box corner has the largest |v̂|.
        let corner = [term.g.v.half_width; 3];
        let speed = norm3(relativistic_velocity(corner, 1.0));
        if speed >= 1.0 - RESONANCE_MARGIN {
            return Err(RvnError::ResonantVelocity(speed));
        }
    }
    Ok(())
}

/// The correction sum of the modified profile at time `t`. With `ĝ`
/// replaced by `∂_tĝ` it is the rate `∂_t ĥ̃`.
pub fn modified_profile_rate(grid: &Grid3, terms: &[CorrectionTerm], t: f64) -> Result<Vec<C64>> {
    check_nonresonant(terms)?;
    Ok(velocity_sum(grid, terms, |xi, vh| {
        let d = gap(xi, vh)?;
        Some(C64::from_polar(1.0, t * d) * I / d)
    }))
}

/// `ĥ̃ = ĥ + Σ_v W e^{it(|ξ|−v̂·ξ)} iã/(|ξ|−v̂·ξ) ĝ`.
pub fn modified_profile(grid: &Grid3, h_hat: &[C64], terms: &[CorrectionTerm], t: f64) -> Result<Vec<C64>> {
    let mut out = modified_profile_rate(grid, terms, t)?;
    for (o, h) in out.iter_mut().zip(h_hat) {
        *o += h;
    }
    Ok(out)
}

/// `Ê = Σ_v W e^{−itv̂·ξ} (−iã)/(|ξ|−v̂·ξ) ĝ`, so that `u = ũ + E` with
/// `ũ = e^{−it|∇|} h̃`.
pub fn e_operator(grid: &Grid3, terms: &[CorrectionTerm], t: f64) -> Result<Vec<C64>> {
    check_nonresonant(terms)?;
    Ok(velocity_sum(grid, terms, |xi, vh| {
        let d = gap(xi, vh)?;
        Some(C64::from_polar(1.0, -t * dot3(vh, xi)) * (-I) / d)
    }))
}

/// Rebuilds `(φ, ∂_tφ)` from `ĥ̃` and the profile families:
/// `φ = φ̃ − |∇|⁻¹ Im E` and `∂_tφ = ∂_tφ̃ + Re E`.
pub fn recover_from_modified(
    grid: &Grid3,
    h_tilde_hat: &[C64],
    terms: &[CorrectionTerm],
    t: f64,
    phi0: C64,
) -> Result<WaveState> {
    let e = e_operator(grid, terms, t)?;
    let u: Vec<C64> = (0..grid.len())
        .map(|i| C64::from_polar(1.0, -t * norm3(grid.xi(i))) * h_tilde_hat[i] + e[i])
        .collect();
    Ok(WaveState::from_u_hat(*grid, t, &u, phi0))
}

/// `ρ̂ = Σ_v W ã(v) f̂(ξ, v)` for a physical density and per-node weights.
pub fn density_hat(f: &DistributionGrid, weight: &[f64]) -> Vec<C64> {
    let mut rho = vec![0.0; f.slab_len()];
    let w = f.v.weight();
    for iv in 0..f.v.len() {
        let c = w * weight[iv];
        for (r, s) in rho.iter_mut().zip(f.slab(iv)) {
            *r += c * s;
        }
    }
    forward(&f.x, &rho)
}

/// One slab of the fourth-order central velocity difference along `axis`,
/// added into `out`; data outside the box reads as zero.
pub fn velocity_derivative_slab(g: &DistributionGrid, iv: usize, axis: usize, out: &mut [f64]) {
    let vg = g.v;
    let h = vg.spacing(axis);
    let m = vg.unravel(iv);
    let stencil = [(-2i64, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];
    for (off, c) in stencil {
        let j = m[axis] as i64 + off;
        if j < 0 || j >= vg.n[axis] as i64 {
            continue;
        }
        let mut mm = m;
        mm[axis] = j as usize;
        let nb = g.slab(vg.index(mm[0], mm[1], mm[2]));
        for (s, v) in out.iter_mut().zip(nb) {
            *s += c * v / h;
        }
    }
}

/// Fourth-order central differences in velocity, with zero data outside the box.
pub fn velocity_gradient(g: &DistributionGrid) -> [Vec<f64>; 3] {
    let nx = g.slab_len();
    std::array::from_fn(|axis| {
        let mut out = vec![0.0; g.data.len()];
        out.par_chunks_mut(nx).enumerate().for_each(|(iv, slab)| velocity_derivative_slab(g, iv, axis, slab));
        out
    })
}

/// `∂_t g = A(4g + v·D_v g) + B·D_v g` with `A = (∂_tφ + v̂·∇φ)(x + v̂t)`,
/// `B = ∇φ(x + v̂t)/√(1+|v|²)` and `D_v = ∇_v − t (∇_v v̂) ∇_x`.
pub fn profile_rhs_g(g: &DistributionGrid, wave: &WaveState, t: f64) -> Result<DistributionGrid> {
    if g.repr != Representation::Profile {
        return Err(RvnError::Config("profile_rhs_g expects profile data".into()));
    }
    let grid = g.x;
    let n = grid.len();
    let fft = Fft3::for_grid(&grid);
    let xi: Vec<[f64; 3]> = (0..n).map(|i| grid.xi(i)).collect();
    let grad_phi: [Vec<C64>; 3] = std::array::from_fn(|a| wave.grad_phi_hat(a));
    let grad_v = velocity_gradient(g);
    let mut out = vec![0.0; g.data.len()];
    out.par_chunks_mut(n).enumerate().for_each(|(iv, slab)| {
        let v = g.v.node(iv);
        let gamma = (1.0 + dot3(v, v)).sqrt();
        let vh = v.map(|c| c / gamma);
        let shift: Vec<C64> = (0..n)
            .map(|i| if grid.is_nyquist(i) { ZERO } else { C64::from_polar(1.0, t * dot3(vh, xi[i])) })
            .collect();
        let to_x = |mut hat: Vec<C64>| -> Vec<f64> {
            fft.inverse(&mut hat);
            hat.into_iter().map(|c| c.re).collect()
        };
        let a_field = to_x(
            (0..n)
                .map(|i| {
                    let conv = wave.dphi_hat[i] + vh[0] * grad_phi[0][i] + vh[1] * grad_phi[1][i] + vh[2] * grad_phi[2][i];
                    shift[i] * conv
                })
                .collect(),
        );
        let b_field: [Vec<f64>; 3] =
            std::array::from_fn(|a| to_x((0..n).map(|i| shift[i] * grad_phi[a][i] / gamma).collect()));
        let mut g_hat: Vec<C64> = g.slab(iv).iter().map(|&s| C64::new(s, 0.0)).collect();
        fft.forward(&mut g_hat);
        let grad_x: [Vec<f64>; 3] = std::array::from_fn(|a| to_x(crate::lpfourier::derivative(&grid, &g_hat, a)));
        let gs = g.slab(iv);
        for ix in 0..n {
            // D_v g = ∇_v g − t M ∇_x g with M_jk = (δ_jk − v̂_j v̂_k)/γ.
            let gx = [grad_x[0][ix], grad_x[1][ix], grad_x[2][ix]];
            let proj = dot3(vh, gx);
            let d: [f64; 3] =
                std::array::from_fn(|j| grad_v[j][iv * n + ix] - t * (gx[j] - vh[j] * proj) / gamma);
            slab[ix] = a_field[ix] * (4.0 * gs[ix] + dot3(v, d))
                + b_field[0][ix] * d[0]
                + b_field[1][ix] * d[1]
                + b_field[2][ix] * d[2];
        }
    });
    Ok(DistributionGrid { x: grid, v: g.v, repr: Representation::Profile, data: out })
}

/// `∂_t ĥ̃` along the nonlinear flow: the correction sum applied to `∂_t g`.
/// The linear source `e^{it|ξ|}ρ̂` cancels identically against the time
/// derivative of the correction phase.
pub fn profile_rhs_htilde(g: &DistributionGrid, wave: &WaveState, t: f64) -> Result<Vec<C64>> {
    let dg = profile_rhs_g(g, wave, t)?;
    let base = CorrectionTerm::base(g);
    let term = CorrectionTerm { weight: base.weight, g: &dg };
    modified_profile_rate(&g.x, &[term], t)
}

/// The bilinear form
/// `T_μ(ξ) = Σ_v W Σ_η e^{it|ξ| − iμt|ξ−η| − itv̂·η} m(ξ−η, v) ĥ^μ(ξ−η) ĝ(η, v)/N`
/// as a circular lattice convolution, with `ĥ^+ = ĥ` and `ĥ^−(ζ) = conj ĥ(−ζ)`.
pub fn bilinear_t<M>(grid: &Grid3, h_hat: &[C64], g: &DistributionGrid, mu: i8, t: f64, symbol: M) -> Vec<C64>
where
    M: Fn([f64; 3], [f64; 3]) -> C64 + Sync,
{
    let n = grid.len();
    let fft = Fft3::for_grid(grid);
    let xi: Vec<[f64; 3]> = (0..n).map(|i| grid.xi(i)).collect();
    let sign = if mu >= 0 { 1.0 } else { -1.0 };
    let h_mu: Vec<C64> = (0..n).map(|i| if mu >= 0 { h_hat[i] } else { h_hat[grid.negate(i)].conj() }).collect();
    let w = g.v.weight();
    let summed = blocked_sum(g.v.len(), n, |iv, local| {
        let v = g.v.node(iv);
        let vh = relativistic_velocity(v, 1.0);
        let mut a: Vec<C64> =
            (0..n).map(|i| symbol(xi[i], v) * C64::from_polar(1.0, -sign * t * norm3(xi[i])) * h_mu[i]).collect();
        fft.inverse(&mut a);
        let mut b: Vec<C64> = g.slab(iv).iter().map(|&s| C64::new(s, 0.0)).collect();
        fft.forward(&mut b);
        for i in 0..n {
            b[i] *= C64::from_polar(1.0, -t * dot3(vh, xi[i]));
        }
        fft.inverse(&mut b);
        let mut prod: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        fft.forward(&mut prod);
        for (l, p) in local.iter_mut().zip(prod) {
            *l += w * p;
        }
    });
    summed.into_iter().enumerate().map(|(i, c)| C64::from_polar(1.0, t * norm3(xi[i])) * c).collect()
}
