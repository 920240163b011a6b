//! The anisotropic phase-space weight and its logarithmic bulk derivative.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{index_functions, KWord};

/// `ω(x, v) = P^{n₀·base − order·k} (1+|v|)^{c}` with
/// `P = 1 + |x|² + (x·v)² + |v|^q`, where `k` is the number of derivatives
/// and `c` the normal-velocity count of the word.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub n0: u32,
    pub base_rate: f64,
    pub order_rate: f64,
    pub v_power: f64,
}

impl Default for WeightSpec {
    /// Exponent 2 at order zero, dropping by 1/4 per derivative.
    fn default() -> Self {
        WeightSpec { n0: 4, base_rate: 0.5, order_rate: 0.25, v_power: 2.0 }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl WeightSpec {
    /// Rates `(20, 10)` and `|v|^{20}`; overflows `f64` for moderate `|x|`.
    pub fn literal(n0: u32) -> WeightSpec {
        WeightSpec { n0, base_rate: 20.0, order_rate: 10.0, v_power: 20.0 }
    }

    pub fn exponent(&self, order: usize) -> f64 {
        self.n0 as f64 * self.base_rate - self.order_rate * order as f64
    }

    pub fn polynomial(&self, x: [f64; 3], v: [f64; 3]) -> f64 {
        let xv = dot(x, v);
        1.0 + dot(x, x) + xv * xv + dot(v, v).sqrt().powf(self.v_power)
    }

    /// `ω` for `order` derivatives carrying normal-velocity count `cvn`.
    pub fn weight(&self, order: usize, cvn: i32, x: [f64; 3], v: [f64; 3]) -> f64 {
        let s = 1.0 + dot(v, v).sqrt();
        self.polynomial(x, v).powf(self.exponent(order)) * s.powi(cvn)
    }

    /// `ω` for a word `β` of new fields and `n_alpha` classical fields.
    pub fn word_weight(&self, n_alpha: usize, beta: &KWord, x: [f64; 3], v: [f64; 3]) -> f64 {
        let (cvn, _, _) = index_functions(beta);
        self.weight(n_alpha + beta.len(), cvn, x, v)
    }

    /// Velocity-only weight `(1+|v|)^{exponent}` of the low-order energy.
    pub fn velocity_weight(&self, order: usize, v: [f64; 3]) -> f64 {
        (1.0 + dot(v, v).sqrt()).powf(self.exponent(order))
    }

    /// `(v·D_v ln ω, D_v ln ω)` at time `t`, with
    /// `D_v = ∇_v − t (∇_v v̂)·∇_x`. Closed form: for `P` above,
    /// `v·D_v P = 2(x·v)² + q|v|^q − 2t(x·v)/γ`.
    pub fn log_bulk_derivative(&self, order: usize, cvn: i32, t: f64, x: [f64; 3], v: [f64; 3]) -> (f64, [f64; 3]) {
        let p = self.polynomial(x, v);
        let e = self.exponent(order);
        let xv = dot(x, v);
        let r = dot(v, v).sqrt();
        let g = (1.0 + r * r).sqrt();
        let vh = v.map(|c| c / g);
        let q = self.v_power;
        let rq2 = if r == 0.0 { 0.0 } else { q * r.powf(q - 2.0) };
        let grad_v: [f64; 3] = std::array::from_fn(|i| 2.0 * xv * x[i] + rq2 * v[i]);
        let grad_x: [f64; 3] = std::array::from_fn(|i| 2.0 * x[i] + 2.0 * xv * v[i]);
        let proj = dot(vh, grad_x);
        let dv_p: [f64; 3] = std::array::from_fn(|i| grad_v[i] - t * (grad_x[i] - vh[i] * proj) / g);
        let radial = if r == 0.0 { [0.0; 3] } else { v.map(|c| cvn as f64 * c / (r * (1.0 + r))) };
        let d: [f64; 3] = std::array::from_fn(|i| e * dv_p[i] / p + radial[i]);
        let along = e * (2.0 * xv * xv + q * r.powf(q) - 2.0 * t * xv / g) / p + cvn as f64 * r / (1.0 + r);
        (along, d)
    }

    /// `[|v·D_v ω/ω| + |D_v ω/ω|] / (1 + ||t| − |x + v̂t||)`.
    pub fn bulk_ratio(&self, order: usize, cvn: i32, t: f64, x: [f64; 3], v: [f64; 3]) -> f64 {
        let (along, d) = self.log_bulk_derivative(order, cvn, t, x, v);
        let g = (1.0 + dot(v, v)).sqrt();
        let y: [f64; 3] = std::array::from_fn(|i| x[i] + v[i] / g * t);
        let cone = 1.0 + (t.abs() - dot(y, y).sqrt()).abs();
        (along.abs() + dot(d, d).sqrt()) / cone
    }
}

/// Maximum of [`WeightSpec::bulk_ratio`] per time.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightRatioReport {
    pub times: Vec<f64>,
    pub max_ratio: Vec<f64>,
    /// Largest over smallest per-time maximum.
    pub spread: f64,
}

/// Samples `x = t·z` with `|z| ≤ 2` and `v ∈ [−v_box, v_box]³` once, then
/// evaluates the weight ratio on the rescaled samples at every `t`
/// (orders `0..=n_max`, counts `cvn ∈ {−1, 0, 1}`).
pub fn weight_ratio_check(
    spec: &WeightSpec,
    times: &[f64],
    samples: usize,
    v_box: f64,
    n_max: usize,
    seed: u64,
) -> WeightRatioReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<([f64; 3], [f64; 3])> = (0..samples)
        .map(|_| {
            let z = loop {
                let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
                if dot(c, c) <= 4.0 {
                    break c;
                }
            };
            let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-v_box..v_box));
            (z, v)
        })
        .collect();
    let max_ratio: Vec<f64> = times
        .iter()
        .map(|&t| {
            pts.par_iter()
                .map(|&(z, v)| {
                    let x = z.map(|c| c * t);
                    let mut m = 0.0f64;
                    for order in 0..=n_max {
                        for cvn in -1..=1 {
                            m = m.max(spec.bulk_ratio(order, cvn, t, x, v));
                        }
                    }
                    m
                })
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let hi = max_ratio.iter().cloned().fold(0.0, f64::max);
    let lo = max_ratio.iter().cloned().fold(f64::INFINITY, f64::min);
    WeightRatioReport { times: times.to_vec(), max_ratio, spread: hi / lo }
}
