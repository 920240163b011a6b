//! Weighted energies of the kinetic profile.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, RvnError};
use crate::geometry::fields::{gamma_coeffs, Kin};
use crate::geometry::{ALetter, KLetter};
use crate::lpfourier::{derivative, Fft3, Grid3, C64};
use crate::profiles::{profile_rhs_g, to_profile, velocity_derivative_slab, DistributionGrid, Representation, WaveState};
use crate::solver::{force_field, Mode, Snapshot};

use super::weight::WeightSpec;

/// Highest derivative order the desk evaluators support.
pub const MAX_ORDER: usize = 1;

/// Which field hit the profile: nothing, one classical field acting on `f`
/// (then pulled back), or one of the new fields acting on `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum FieldTerm {
    Base,
    Classical(ALetter),
    New(KLetter),
}

impl FieldTerm {
    pub fn order(&self) -> usize {
        match self {
            FieldTerm::Base => 0,
            _ => 1,
        }
    }

    pub fn cvn(&self) -> i32 {
        match self {
            FieldTerm::New(l) => l.indices().0,
            _ => 0,
        }
    }

    /// Every term up to `n_max` in a fixed order.
    pub fn up_to(n_max: usize) -> Vec<FieldTerm> {
        let mut out = vec![FieldTerm::Base];
        if n_max >= 1 {
            out.extend(ALetter::all().into_iter().map(FieldTerm::Classical));
            out.extend(KLetter::all().into_iter().map(FieldTerm::New));
        }
        out
    }
}

impl fmt::Display for FieldTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTerm::Base => write!(f, "g"),
            FieldTerm::Classical(a) => write!(f, "{a}g"),
            FieldTerm::New(k) => write!(f, "{k}g"),
        }
    }
}

fn check_order(n_max: usize) -> Result<()> {
    if n_max > MAX_ORDER {
        return Err(RvnError::OrderOverflow { order: n_max, max: MAX_ORDER });
    }
    Ok(())
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross_e(i: usize, a: [f64; 3]) -> [f64; 3] {
    match i {
        0 => [0.0, -a[2], a[1]],
        1 => [a[2], 0.0, -a[0]],
        _ => [-a[1], a[0], 0.0],
    }
}

/// Spectral `∇_x` of one slab; Nyquist lines are dropped.
pub(crate) fn slab_grad_x(grid: &Grid3, fft: &Fft3, slab: &[f64]) -> [Vec<f64>; 3] {
    let mut hat: Vec<C64> = slab.iter().map(|&s| C64::new(s, 0.0)).collect();
    fft.forward(&mut hat);
    std::array::from_fn(|a| {
        let mut d = derivative(grid, &hat, a);
        fft.inverse(&mut d);
        d.into_iter().map(|c| c.re).collect()
    })
}

fn slab_grad_v(g: &DistributionGrid, iv: usize) -> [Vec<f64>; 3] {
    std::array::from_fn(|a| {
        let mut out = vec![0.0; g.slab_len()];
        velocity_derivative_slab(g, iv, a, &mut out);
        out
    })
}

/// `∂_t g` under the dynamics of `mode`: zero unless the force acts.
pub fn profile_rate(g: &DistributionGrid, wave: &WaveState, t: f64, mode: Mode) -> Result<Option<DistributionGrid>> {
    match mode {
        Mode::Coupled => Ok(Some(profile_rhs_g(g, wave, t)?)),
        _ => Ok(None),
    }
}

/// Pointwise value of every term at one phase point.
struct PointData {
    y: [f64; 3],
    v: [f64; 3],
    g: f64,
    gx: [f64; 3],
    gv: [f64; 3],
    rate: f64,
}

fn term_value(term: FieldTerm, t: f64, p: &PointData, kin: &Kin<f64>) -> f64 {
    match term {
        FieldTerm::Base => p.g,
        FieldTerm::Classical(a) => {
            let gamma = kin.g;
            let vh = p.v.map(|c| c / gamma);
            match a {
                ALetter::S => dot(p.y, p.gx) + t * p.rate,
                ALetter::Dx(i) => p.gx[i as usize],
                ALetter::Rot(i) => dot(cross_e(i as usize, p.y), p.gx) + dot(cross_e(i as usize, p.v), p.gv),
                ALetter::Boost(i) => {
                    let i = i as usize;
                    -p.y[i] * dot(vh, p.gx) + gamma * p.gv[i] + (p.y[i] + vh[i] * t) * p.rate
                }
            }
        }
        FieldTerm::New(l) => {
            let c = gamma_coeffs(l, kin);
            dot(c.ax, p.gx) + dot(c.av, p.gv)
        }
    }
}

/// `Σ_{x,v} ω²|term|²` per term, in the order of `terms`.
fn weighted_squares(
    g: &DistributionGrid,
    rate: Option<&DistributionGrid>,
    t: f64,
    spec: &WeightSpec,
    terms: &[FieldTerm],
) -> Vec<f64> {
    let grid = g.x;
    let n = grid.len();
    let fft = Fft3::for_grid(&grid);
    let points: Vec<[f64; 3]> = (0..n).map(|i| grid.point(i)).collect();
    let need_derivs = terms.iter().any(|t| *t != FieldTerm::Base);
    let per_slab: Vec<Vec<f64>> = (0..g.v.len())
        .into_par_iter()
        .map(|iv| {
            let v = g.v.node(iv);
            let slab = g.slab(iv);
            let (gx, gv) = if need_derivs {
                (slab_grad_x(&grid, &fft, slab), slab_grad_v(g, iv))
            } else {
                (std::array::from_fn(|_| vec![0.0; n]), std::array::from_fn(|_| vec![0.0; n]))
            };
            let rs = rate.map(|r| r.slab(iv));
            let mut acc = vec![0.0; terms.len()];
            for ix in 0..n {
                let y = points[ix];
                let kin = Kin::new(y, v);
                let p = PointData {
                    y,
                    v,
                    g: slab[ix],
                    gx: [gx[0][ix], gx[1][ix], gx[2][ix]],
                    gv: [gv[0][ix], gv[1][ix], gv[2][ix]],
                    rate: rs.map_or(0.0, |r| r[ix]),
                };
                for (k, term) in terms.iter().enumerate() {
                    let w = spec.weight(term.order(), term.cvn(), y, v);
                    let val = term_value(*term, t, &p, &kin);
                    acc[k] += (w * val) * (w * val);
                }
            }
            acc
        })
        .collect();
    let cell = grid.cell_volume() * g.v.weight();
    let mut total = vec![0.0; terms.len()];
    for s in &per_slab {
        for (a, b) in total.iter_mut().zip(s) {
            *a += b;
        }
    }
    total.into_iter().map(|s| s * cell).collect()
}

/// Top-order and lower-order sums of `‖ω g^α_β‖_{L²}` with per-term norms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HighEnergy {
    pub top: f64,
    pub lower: f64,
    pub terms: Vec<(String, f64)>,
}

/// Evaluate the high-order kinetic energy from a profile and its rate.
pub fn energy_high_f_profile(
    g: &DistributionGrid,
    rate: Option<&DistributionGrid>,
    t: f64,
    spec: &WeightSpec,
    n_max: usize,
) -> Result<HighEnergy> {
    check_order(n_max)?;
    if g.repr != Representation::Profile {
        return Err(RvnError::Config("energies are evaluated on the profile".into()));
    }
    let terms = FieldTerm::up_to(n_max);
    let sq = weighted_squares(g, rate, t, spec, &terms);
    let mut out = HighEnergy { top: 0.0, lower: 0.0, terms: Vec::with_capacity(terms.len()) };
    for (term, s) in terms.iter().zip(sq) {
        let norm = s.sqrt();
        if term.order() == n_max {
            out.top += norm;
        } else {
            out.lower += norm;
        }
        out.terms.push((term.to_string(), norm));
    }
    Ok(out)
}

/// High-order kinetic energy of a snapshot under the dynamics of `mode`.
pub fn energy_high_f(snap: &mut Snapshot, spec: &WeightSpec, n_max: usize, mode: Mode) -> Result<HighEnergy> {
    check_order(n_max)?;
    let t = snap.t;
    let wave = snap.wave.clone();
    let g = snap.profile();
    let rate = if n_max > 0 { profile_rate(g, &wave, t, mode)? } else { None };
    energy_high_f_profile(g, rate.as_ref(), t, spec, n_max)
}

/// Running correction `∫ ∫ K(s, x + v̂s, v) ∇_v^α g(s, x, v) dx ds` for the
/// top-order velocity derivatives, by the trapezoidal rule in `s` starting
/// at the first recorded time.
#[derive(Clone, Debug, Default)]
pub struct LowEnergyAccumulator {
    n_max: usize,
    last: Option<(f64, Vec<[Vec<f64>; 3]>)>,
    integral: Vec<[Vec<f64>; 3]>,
}

/// Velocity multi-indices of order `n`, zero-based axes (`None` is order 0).
fn top_multis(n_max: usize) -> Vec<Option<usize>> {
    if n_max == 0 {
        vec![None]
    } else {
        (0..3).map(Some).collect()
    }
}

impl LowEnergyAccumulator {
    pub fn new(n_max: usize) -> Result<Self> {
        check_order(n_max)?;
        Ok(LowEnergyAccumulator { n_max, last: None, integral: Vec::new() })
    }

    /// True until the first record.
    pub fn is_empty(&self) -> bool {
        self.last.is_none()
    }

    fn integrand(&self, g: &DistributionGrid, wave: &WaveState, t: f64) -> Vec<[Vec<f64>; 3]> {
        let force = force_field(wave, &g.v, 1.0);
        let kp: [DistributionGrid; 3] = std::array::from_fn(|k| to_profile(&force[k], t));
        let dx3 = g.x.cell_volume();
        top_multis(self.n_max)
            .into_iter()
            .map(|alpha| {
                let per_v: Vec<[f64; 3]> = (0..g.v.len())
                    .into_par_iter()
                    .map(|iv| {
                        let d = match alpha {
                            None => g.slab(iv).to_vec(),
                            Some(a) => {
                                let mut out = vec![0.0; g.slab_len()];
                                velocity_derivative_slab(g, iv, a, &mut out);
                                out
                            }
                        };
                        std::array::from_fn(|k| kp[k].slab(iv).iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() * dx3)
                    })
                    .collect();
                std::array::from_fn(|k| per_v.iter().map(|c| c[k]).collect())
            })
            .collect()
    }

    /// Record the integrand at time `t` from the profile and the wave.
    pub fn record(&mut self, g: &DistributionGrid, wave: &WaveState, t: f64) {
        let now = self.integrand(g, wave, t);
        if self.integral.is_empty() {
            self.integral = now.iter().map(|c| std::array::from_fn(|k| vec![0.0; c[k].len()])).collect();
        }
        if let Some((t0, prev)) = &self.last {
            let h = 0.5 * (t - t0);
            for (acc, (a, b)) in self.integral.iter_mut().zip(prev.iter().zip(&now)) {
                for k in 0..3 {
                    for (s, (x, y)) in acc[k].iter_mut().zip(a[k].iter().zip(&b[k])) {
                        *s += h * (x + y);
                    }
                }
            }
        }
        self.last = Some((t, now));
    }

    /// The accumulated correction for the top-order index `alpha`.
    pub fn correction(&self, alpha: Option<usize>) -> Option<&[Vec<f64>; 3]> {
        let k = top_multis(self.n_max).iter().position(|a| *a == alpha)?;
        self.integral.get(k)
    }
}

/// Fourth-order central difference of a velocity-lattice array.
fn v_derivative(vg: &crate::profiles::VGrid, data: &[f64], axis: usize) -> Vec<f64> {
    let h = vg.spacing(axis);
    (0..vg.len())
        .map(|iv| {
            let m = vg.unravel(iv);
            let mut s = 0.0;
            for (off, c) in [(-2i64, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)] {
                let j = m[axis] as i64 + off;
                if j < 0 || j >= vg.n[axis] as i64 {
                    continue;
                }
                let mut mm = m;
                mm[axis] = j as usize;
                s += c * data[vg.index(mm[0], mm[1], mm[2])];
            }
            s / h
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowEnergy {
    pub total: f64,
    pub terms: Vec<(String, f64)>,
}

/// `Σ_α ‖(1+|v|)^{e(|α|)}(∇_v^α ĝ(t, 0, v) − ∇_v·g̃_α)‖_{L²_v}` over
/// `|α| ≤ n_max`; the correction enters at top order only.
pub fn energy_low_f(
    g: &DistributionGrid,
    acc: Option<&LowEnergyAccumulator>,
    spec: &WeightSpec,
    n_max: usize,
) -> Result<LowEnergy> {
    check_order(n_max)?;
    let vg = g.v;
    let dx3 = g.x.cell_volume();
    let mean: Vec<f64> = (0..vg.len()).map(|iv| g.slab(iv).iter().sum::<f64>() * dx3).collect();
    let mut alphas = vec![None];
    if n_max >= 1 {
        alphas.extend((0..3).map(Some));
    }
    let mut out = LowEnergy { total: 0.0, terms: Vec::new() };
    for alpha in alphas {
        let order = usize::from(alpha.is_some());
        let mut slice = match alpha {
            None => mean.clone(),
            Some(a) => v_derivative(&vg, &mean, a),
        };
        if order == n_max {
            if let Some(c) = acc.and_then(|a| a.correction(alpha)) {
                for k in 0..3 {
                    for (s, d) in slice.iter_mut().zip(v_derivative(&vg, &c[k], k)) {
                        *s -= d;
                    }
                }
            }
        }
        let sq: f64 = slice
            .iter()
            .enumerate()
            .map(|(iv, s)| {
                let w = spec.velocity_weight(order, vg.node(iv));
                (w * s) * (w * s)
            })
            .sum();
        let norm = (sq * vg.weight()).sqrt();
        let name = match alpha {
            None => "g0".to_string(),
            Some(a) => format!("dv{}g0", a + 1),
        };
        out.total += norm;
        out.terms.push((name, norm));
    }
    Ok(out)
}
