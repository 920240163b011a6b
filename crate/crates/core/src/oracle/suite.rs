//! Seeded test functions and phase-space samples for the verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::jet::Real;

/// `P(x, v)·exp(−|x − a|²/2σ_x² − |v − b|²/2σ_v²)` with `P` a quadratic
/// polynomial in the six phase-space variables.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestFunction {
    pub center_x: [f64; 3],
    pub center_v: [f64; 3],
    pub width_x: f64,
    pub width_v: f64,
    pub constant: f64,
    pub linear: [f64; 6],
    /// Upper-triangular quadratic coefficients, row-major over `i ≤ j`.
    pub quadratic: [f64; 21],
}

impl TestFunction {
    /// Value on any [`Real`], so jets and plain floats share one definition.
    pub fn eval<R: Real>(&self, x: &[R; 3], v: &[R; 3]) -> R {
        let z: [R; 6] = [x[0].clone(), x[1].clone(), x[2].clone(), v[0].clone(), v[1].clone(), v[2].clone()];
        let mut poly = z[0].cst(self.constant);
        let mut q = 0;
        for i in 0..6 {
            poly = poly + z[i].clone() * self.linear[i];
            for j in i..6 {
                poly = poly + z[i].clone() * z[j].clone() * self.quadratic[q];
                q += 1;
            }
        }
        let mut arg = z[0].cst(0.0);
        for a in 0..3 {
            let dx = x[a].clone() - self.center_x[a];
            let dv = v[a].clone() - self.center_v[a];
            arg = arg - dx.square() * (0.5 / (self.width_x * self.width_x))
                - dv.square() * (0.5 / (self.width_v * self.width_v));
        }
        poly * arg.exp()
    }

    pub fn value(&self, x: [f64; 3], v: [f64; 3]) -> f64 {
        self.eval(&x, &v)
    }

    /// Time-independent phase-space callback for the difference oracles.
    pub fn phase_fn(&self) -> impl Fn(f64, [f64; 3], [f64; 3]) -> f64 + Sync + '_ {
        move |_t, x, v| self.value(x, v)
    }
}

/// `count` functions drawn from `seed`: centres within 1 of the origin,
/// widths in `[1, 2]`, polynomial coefficients of size at most 1/2.
pub fn gaussian_suite(seed: u64, count: usize) -> Vec<TestFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| TestFunction {
            center_x: std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
            center_v: std::array::from_fn(|_| rng.gen_range(-1.0..1.0)),
            width_x: rng.gen_range(1.0..2.0),
            width_v: rng.gen_range(1.0..2.0),
            constant: rng.gen_range(0.5..1.5),
            linear: std::array::from_fn(|_| rng.gen_range(-0.5..0.5)),
            quadratic: std::array::from_fn(|_| rng.gen_range(-0.25..0.25)),
        })
        .collect()
}

/// One evaluation point `(t, x, v)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: [f64; 3],
    pub v: [f64; 3],
}

/// Uniform samples with `t ∈ [0, t_max]`, `x ∈ [−x_box, x_box]³`,
/// `v ∈ [−v_box, v_box]³`.
pub fn phase_samples(seed: u64, count: usize, t_max: f64, x_box: f64, v_box: f64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Sample {
            t: rng.gen_range(0.0..=t_max),
            x: std::array::from_fn(|_| rng.gen_range(-x_box..x_box)),
            v: std::array::from_fn(|_| rng.gen_range(-v_box..v_box)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    #[test]
    fn suite_is_reproducible() {
        assert_eq!(gaussian_suite(3, 4), gaussian_suite(3, 4));
        assert_ne!(gaussian_suite(3, 1), gaussian_suite(4, 1));
        assert_eq!(phase_samples(9, 5, 1.0, 1.0, 1.0), phase_samples(9, 5, 1.0, 1.0, 1.0));
    }

    #[test]
    fn jet_and_float_values_agree() {
        let f = &gaussian_suite(1, 1)[0];
        let (x, v) = ([0.3, -0.2, 0.7], [1.1, 0.4, -0.6]);
        let s = Jet::seed(&[x[0], x[1], x[2], v[0], v[1], v[2]], 2);
        let xs = [s[0].clone(), s[1].clone(), s[2].clone()];
        let vs = [s[3].clone(), s[4].clone(), s[5].clone()];
        assert!((f.eval(&xs, &vs).value() - f.value(x, v)).abs() < 1e-14);
    }
}
