//! Brute-force evaluation of the weighted energies.
//!
//! Spatial derivatives and transforms are explicit DFT sums, velocity
//! derivatives use Lagrange weights derived here, and every field, weight
//! and cutoff comes from this module or [`super::literal`].

use std::f64::consts::PI;

use crate::geometry::{ALetter, KLetter, VectorFieldId};
use crate::lpfourier::C64;
use crate::profiles::{DistributionGrid, Representation, VGrid, WaveState};

use super::literal::{below, literal_coeffs};
use super::spectral::{direct_dft, transport_slab, wavevector};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn lorentz(v: [f64; 3]) -> f64 {
    (1.0 + dot(v, v)).sqrt()
}

fn nyquist_bin(n: [usize; 3], idx: usize) -> bool {
    let m = [idx / (n[1] * n[2]), (idx / n[2]) % n[1], idx % n[2]];
    (0..3).any(|a| n[a] % 2 == 0 && m[a] == n[a] / 2)
}

/// Weight `P^{e₀ − e₁·order}(1+|v|)^{c}` with `P = 1 + |x|² + (x·v)² + |v|^q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectWeight {
    pub base_exponent: f64,
    pub per_order: f64,
    pub v_power: f64,
}

impl DirectWeight {
    fn exponent(&self, order: usize) -> f64 {
        self.base_exponent - self.per_order * order as f64
    }

    fn phase(&self, order: usize, cvn: i32, x: [f64; 3], v: [f64; 3]) -> f64 {
        let xv = dot(x, v);
        let p = 1.0 + dot(x, x) + xv * xv + norm(v).powf(self.v_power);
        p.powf(self.exponent(order)) * (1.0 + norm(v)).powi(cvn)
    }

    fn velocity(&self, order: usize, v: [f64; 3]) -> f64 {
        (1.0 + norm(v)).powf(self.exponent(order))
    }
}

/// Normal-velocity count of each new field.
fn normal_count(l: KLetter) -> i32 {
    match l {
        KLetter::SvHat => 1,
        KLetter::OmegaHat(_) => -1,
        _ => 0,
    }
}

/// Weights `c_j` with `f'(0) ≈ Σ c_j f(o_j)` for nodes at integer offsets
/// `o_j`, from the derivatives of the Lagrange basis.
pub fn lagrange_derivative_weights(offsets: &[i64]) -> Vec<f64> {
    let o: Vec<f64> = offsets.iter().map(|&k| k as f64).collect();
    (0..o.len())
        .map(|j| {
            let denom: f64 = (0..o.len()).filter(|&m| m != j).map(|m| o[j] - o[m]).product();
            // d/ds Π_{m≠j} (s − o_m) at s = 0
            let mut num = 0.0;
            for skip in (0..o.len()).filter(|&m| m != j) {
                num += (0..o.len()).filter(|&m| m != j && m != skip).map(|m| -o[m]).product::<f64>();
            }
            num / denom
        })
        .collect()
}

fn velocity_index(vg: &VGrid, m: [usize; 3]) -> usize {
    (m[0] * vg.n[1] + m[1]) * vg.n[2] + m[2]
}

/// `∂_{v_axis}` of the velocity-lattice function `at(iv)` at node `iv`;
/// values outside the box read as zero.
fn v_partial<F: Fn(usize) -> f64>(vg: &VGrid, iv: usize, axis: usize, weights: &[f64], at: F) -> f64 {
    let m = [iv / (vg.n[1] * vg.n[2]), (iv / vg.n[2]) % vg.n[1], iv % vg.n[2]];
    let h = 2.0 * vg.half_width / vg.n[axis] as f64;
    let mut s = 0.0;
    for (off, c) in (-2i64..=2).zip(weights) {
        let j = m[axis] as i64 + off;
        if *c == 0.0 || j < 0 || j >= vg.n[axis] as i64 {
            continue;
        }
        let mut mm = m;
        mm[axis] = j as usize;
        s += c * at(velocity_index(vg, mm));
    }
    s / h
}

fn five_point() -> Vec<f64> {
    lagrange_derivative_weights(&[-2, -1, 0, 1, 2])
}

fn complex(data: &[f64]) -> Vec<C64> {
    data.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// Trigonometric-interpolant gradient of one periodic slab, Nyquist dropped.
fn x_gradient(n: [usize; 3], half_length: f64, slab: &[f64]) -> [Vec<f64>; 3] {
    let hat = direct_dft(n, &complex(slab), false);
    std::array::from_fn(|a| {
        let d: Vec<C64> = hat
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                if nyquist_bin(n, idx) {
                    ZERO
                } else {
                    C64::new(0.0, wavevector(n, half_length, idx)[a]) * c
                }
            })
            .collect();
        direct_dft(n, &d, true).into_iter().map(|c| c.re).collect()
    })
}

/// `∂_t g = A(4g + v·D_v g) + B·D_v g` with `A, B` the wave field and its
/// gradient evaluated along `x + v̂t`.
pub fn direct_profile_rate(g: &DistributionGrid, wave: &WaveState, t: f64) -> DistributionGrid {
    let (n, l) = (g.x.n, g.x.half_length);
    let nx = g.slab_len();
    let c5 = five_point();
    let mut out = DistributionGrid::zeros(g.x, g.v, Representation::Profile);
    for iv in 0..g.v.len() {
        let v = g.v.node(iv);
        let gam = lorentz(v);
        let vh = v.map(|c| c / gam);
        let shifted = |coef: &dyn Fn(usize, [f64; 3]) -> C64| -> Vec<f64> {
            let hat: Vec<C64> = (0..nx)
                .map(|idx| {
                    if nyquist_bin(n, idx) {
                        return ZERO;
                    }
                    let xi = wavevector(n, l, idx);
                    C64::from_polar(1.0, t * dot(vh, xi)) * coef(idx, xi)
                })
                .collect();
            direct_dft(n, &hat, true).into_iter().map(|c| c.re).collect()
        };
        let a_field = shifted(&|idx, xi| wave.dphi_hat[idx] + C64::new(0.0, dot(vh, xi)) * wave.phi_hat[idx]);
        let b_field: [Vec<f64>; 3] =
            std::array::from_fn(|a| shifted(&|idx, xi| C64::new(0.0, xi[a] / gam) * wave.phi_hat[idx]));
        let gx = x_gradient(n, l, g.slab(iv));
        let slab = g.slab(iv);
        for ix in 0..nx {
            let grad_x = [gx[0][ix], gx[1][ix], gx[2][ix]];
            let bulk: [f64; 3] = std::array::from_fn(|j| {
                let dv = v_partial(&g.v, iv, j, &c5, |k| g.at(ix, k));
                let jac_row: f64 =
                    (0..3).map(|k| (if j == k { 1.0 / gam } else { 0.0 } - v[j] * v[k] / gam.powi(3)) * grad_x[k]).sum();
                dv - t * jac_row
            });
            let b = [b_field[0][ix], b_field[1][ix], b_field[2][ix]];
            out.data[iv * nx + ix] = a_field[ix] * (4.0 * slab[ix] + dot(v, bulk)) + dot(b, bulk);
        }
    }
    out
}

/// The profile of a physical density, slab by slab: `g(x, v) = f(x + v̂t, v)`.
pub fn direct_profile(f: &DistributionGrid, t: f64) -> DistributionGrid {
    let mut out = DistributionGrid::zeros(f.x, f.v, Representation::Profile);
    let nx = f.slab_len();
    for iv in 0..f.v.len() {
        let v = f.v.node(iv);
        let gam = lorentz(v);
        let shift = v.map(|c| -c / gam * t);
        let s = transport_slab(f.x.n, f.x.half_length, f.slab(iv), shift);
        out.data[iv * nx..(iv + 1) * nx].copy_from_slice(&s);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct DirectEnergy {
    pub top: f64,
    pub lower: f64,
    /// Per-term norms: the profile, the ten classical fields in the order
    /// `S, ∂_x, Ω̃, L̃`, then the seventeen new fields.
    pub norms: Vec<f64>,
}

fn classical_field(a: ALetter) -> VectorFieldId {
    match a {
        ALetter::S => VectorFieldId::Scaling,
        ALetter::Dx(i) => VectorFieldId::Dx(i),
        ALetter::Rot(i) => VectorFieldId::RotTilde(i),
        ALetter::Boost(i) => VectorFieldId::BoostTilde(i),
    }
}

/// `Σ ‖ω Γg‖_{L²}` split into order `n_max` and below, `n_max ≤ 1`.
///
/// A classical field `Γ` acts on `f(x, v) = g(x − v̂t, v)`; in profile
/// coordinates `∂_t ↦ ∂_t − v̂·∇`, `∇_x ↦ ∇` and `∇_v ↦ ∇_v − t(∂_v v̂)∇`.
pub fn direct_energy_high_f(
    g: &DistributionGrid,
    rate: Option<&DistributionGrid>,
    t: f64,
    weight: &DirectWeight,
    n_max: usize,
) -> DirectEnergy {
    let (n, l) = (g.x.n, g.x.half_length);
    let nx = g.slab_len();
    let c5 = five_point();
    let mut fields: Vec<(usize, i32, Option<VectorFieldId>)> = vec![(0, 0, None)];
    if n_max >= 1 {
        let classical = [ALetter::S]
            .into_iter()
            .chain((0..3).map(ALetter::Dx))
            .chain((0..3).map(ALetter::Rot))
            .chain((0..3).map(ALetter::Boost));
        fields.extend(classical.map(|a| (1, 0, Some(classical_field(a)))));
        fields.extend((0..17).map(KLetter::from_index).map(|k| (1, normal_count(k), Some(VectorFieldId::Gamma(k)))));
    }
    let mut sq = vec![0.0; fields.len()];
    for iv in 0..g.v.len() {
        let v = g.v.node(iv);
        let gam = lorentz(v);
        let vh = v.map(|c| c / gam);
        let gx = x_gradient(n, l, g.slab(iv));
        for ix in 0..nx {
            let y = g.x.point(ix);
            let val = g.at(ix, iv);
            let grad = [gx[0][ix], gx[1][ix], gx[2][ix]];
            let gv: [f64; 3] = std::array::from_fn(|j| v_partial(&g.v, iv, j, &c5, |k| g.at(ix, k)));
            let dt = rate.map_or(0.0, |r| r.at(ix, iv));
            for (k, (order, cvn, field)) in fields.iter().enumerate() {
                let term = match field {
                    None => val,
                    Some(VectorFieldId::Gamma(letter)) => {
                        let c = literal_coeffs(VectorFieldId::Gamma(*letter), t, y, v);
                        dot(c.ax, grad) + dot(c.av, gv)
                    }
                    Some(id) => {
                        let x = std::array::from_fn(|a| y[a] + vh[a] * t);
                        let c = literal_coeffs(*id, t, x, v);
                        let pulled_v: [f64; 3] = std::array::from_fn(|j| {
                            gv[j] - t
                                * (0..3)
                                    .map(|m| (if j == m { 1.0 / gam } else { 0.0 } - v[j] * v[m] / gam.powi(3)) * grad[m])
                                    .sum::<f64>()
                        });
                        c.at * (dt - dot(vh, grad)) + dot(c.ax, grad) + dot(c.av, pulled_v)
                    }
                };
                let w = weight.phase(*order, *cvn, y, v);
                sq[k] += (w * term).powi(2);
            }
        }
    }
    let cell = g.x.cell_volume() * (0..3).map(|a| g.v.spacing(a)).product::<f64>();
    let norms: Vec<f64> = sq.iter().map(|s| (s * cell).sqrt()).collect();
    let mut out = DirectEnergy { top: 0.0, lower: 0.0, norms: norms.clone() };
    for ((order, _, _), nrm) in fields.iter().zip(norms) {
        if *order == n_max {
            out.top += nrm;
        } else {
            out.lower += nrm;
        }
    }
    out
}

/// Norms of `(1+|v|)^{e}∇_v^α ∫g dx` for `α = 0` then `∂_{v_1..v_3}`.
pub fn direct_energy_low_f(g: &DistributionGrid, weight: &DirectWeight, n_max: usize) -> Vec<f64> {
    let dx3 = g.x.cell_volume();
    let dv3: f64 = (0..3).map(|a| g.v.spacing(a)).product();
    let mean: Vec<f64> = (0..g.v.len()).map(|iv| (0..g.slab_len()).map(|ix| g.at(ix, iv)).sum::<f64>() * dx3).collect();
    let c5 = five_point();
    let mut out = Vec::new();
    let norm_of = |order: usize, vals: &dyn Fn(usize) -> f64| {
        let s: f64 = (0..g.v.len()).map(|iv| (weight.velocity(order, g.v.node(iv)) * vals(iv)).powi(2)).sum();
        (s * dv3).sqrt()
    };
    out.push(norm_of(0, &|iv| mean[iv]));
    if n_max >= 1 {
        for axis in 0..3 {
            out.push(norm_of(1, &|iv| v_partial(&g.v, iv, axis, &c5, |k| mean[k])));
        }
    }
    out
}

/// Dyadic band range `[k_min, k_max]` with `3/2·2^k` between the
/// fundamental and the Nyquist frequency.
fn bands(n: [usize; 3], half_length: f64) -> (i32, i32) {
    let fundamental = PI / half_length;
    let nyq = n.iter().map(|&m| m as f64 / 2.0).fold(f64::INFINITY, f64::min) * fundamental;
    ((fundamental / 1.5).log2().floor() as i32, (nyq / 1.5).log2().floor() as i32)
}

fn band(r: f64, k: i32) -> f64 {
    below(r, k) - below(r, k - 1)
}

/// `|∇_ξⁿ F|²` summed over all ordered index tuples, with `F` the
/// continuum transform of the lattice function whose raw DFT is `hat`.
fn xi_derivative_sq(n: [usize; 3], half_length: f64, points: &[[f64; 3]], hat: &[C64], order: usize) -> Vec<f64> {
    let cell = (2.0 * half_length).powi(3) / hat.len() as f64;
    let phys = direct_dft(n, hat, true);
    let mut out = vec![0.0; hat.len()];
    let tuples = 3usize.pow(order as u32);
    for code in 0..tuples {
        let axes: Vec<usize> = (0..order).map(|p| (code / 3usize.pow(p as u32)) % 3).collect();
        let weighted: Vec<C64> =
            phys.iter().zip(points).map(|(h, x)| h * axes.iter().map(|&a| x[a]).product::<f64>()).collect();
        for (o, c) in out.iter_mut().zip(direct_dft(n, &weighted, false)) {
            *o += (c * cell).norm_sqr();
        }
    }
    out
}

/// Wave energies `(high, low, terms)` with the terms in the order
/// `band, ‖ĥ‖, ‖ĥ̃‖`, then `X_n(h), X_n(∂_th), X_n(∂_t∇(1+|∇|)⁻¹h)` for
/// `n = 0..=3`.
///
/// `density` is the physical distribution at time `t`; `None` means the
/// field is free and `h̃ = h`. `sourced` switches on `∂_t h = e^{it|∇|}ρ`.
pub fn direct_energy_phi(wave: &WaveState, density: Option<&DistributionGrid>, sourced: bool) -> (f64, f64, Vec<f64>) {
    let grid = wave.grid;
    let (n, l) = (grid.n, grid.half_length);
    let t = wave.t;
    let len = grid.len();
    let xi: Vec<[f64; 3]> = (0..len).map(|i| wavevector(n, l, i)).collect();
    let radius: Vec<f64> = xi.iter().map(|&x| norm(x)).collect();
    let points: Vec<[f64; 3]> = (0..len).map(|i| grid.point(i)).collect();
    let h: Vec<C64> = (0..len)
        .map(|i| C64::from_polar(1.0, t * radius[i]) * (wave.dphi_hat[i] - C64::new(0.0, radius[i]) * wave.phi_hat[i]))
        .collect();
    let mut h_tilde = h.clone();
    let mut rate = vec![ZERO; len];
    if let Some(f) = density {
        let g = direct_profile(f, t);
        let dv3: f64 = (0..3).map(|a| f.v.spacing(a)).product();
        for iv in 0..f.v.len() {
            let v = f.v.node(iv);
            let gam = lorentz(v);
            let vh = v.map(|c| c / gam);
            let g_hat = direct_dft(n, &complex(g.slab(iv)), false);
            for i in 0..len {
                if radius[i] == 0.0 || nyquist_bin(n, i) {
                    continue;
                }
                let gap = radius[i] - dot(vh, xi[i]);
                h_tilde[i] += dv3 / gam * C64::from_polar(1.0, t * gap) * C64::new(0.0, 1.0 / gap) * g_hat[i];
            }
            if sourced {
                let f_hat = direct_dft(n, &complex(f.slab(iv)), false);
                for i in 0..len {
                    rate[i] += dv3 / gam * C64::from_polar(1.0, t * radius[i]) * f_hat[i];
                }
            }
        }
    }
    let xi_cell = (PI / l).powi(3);
    let (k_lo, k_hi) = bands(n, l);
    let sq = |hat: &[C64], order: usize| xi_derivative_sq(n, l, &points, hat, order);
    let h0 = sq(&h, 0);
    let ht0 = sq(&h_tilde, 0);
    let ht1 = sq(&h_tilde, 1);
    let mut band_sup = 0.0f64;
    for k in k_lo..=k_hi {
        let s = 2f64.powi(k);
        let (mut a, mut b, mut c) = (0.0f64, 0.0f64, 0.0);
        for i in 0..len {
            let p = band(radius[i], k);
            a = a.max(p * h0[i].sqrt());
            b = b.max(p * ht0[i].sqrt());
            c += p * p * ht1[i];
        }
        band_sup = band_sup.max(s * a + s * b + s.sqrt() * (c * xi_cell).sqrt());
    }
    let l2 = |v: &[f64]| (v.iter().sum::<f64>() * xi_cell).sqrt();
    let (l2_h, l2_ht) = (l2(&h0), l2(&ht0));
    let mut terms = vec![band_sup, l2_h, l2_ht];
    let high = band_sup + l2_h + l2_ht;
    let x_norm = |vals: &[f64], order: usize| {
        (k_lo..=k_hi)
            .map(|k| {
                let sup = (0..len).map(|i| band(radius[i], k) * vals[i].sqrt()).fold(0.0, f64::max);
                2f64.powi((order as i32 + 1) * k) * sup
            })
            .fold(0.0, f64::max)
    };
    let mut low = 0.0;
    for order in 0..=3usize {
        let a = x_norm(&sq(&h, order), order);
        let b = x_norm(&sq(&rate, order), order);
        let mut grad_sq = vec![0.0; len];
        for axis in 0..3 {
            let comp: Vec<C64> =
                (0..len).map(|i| C64::new(0.0, xi[i][axis] / (1.0 + radius[i])) * rate[i]).collect();
            for (s, v) in grad_sq.iter_mut().zip(sq(&comp, order)) {
                *s += v;
            }
        }
        let c = x_norm(&grad_sq, order);
        low += a + (1.0 + t.abs()) * b + (1.0 + t.abs()).powi(2) * c;
        terms.extend([a, b, c]);
    }
    (high, low, terms)
}
