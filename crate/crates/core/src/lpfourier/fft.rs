//! Three-dimensional complex FFT on row-major storage, built from
//! one-dimensional `rustfft` plans applied axis by axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::Grid3;

type Plan = Arc<dyn Fft<f64>>;

pub struct Fft3 {
    n: [usize; 3],
    fwd: [Plan; 3],
    inv: [Plan; 3],
}

static CACHE: Lazy<Mutex<HashMap<[usize; 3], Arc<Fft3>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

impl Fft3 {
    pub fn new(n: [usize; 3]) -> Fft3 {
        let mut planner = FftPlanner::new();
        let fwd = std::array::from_fn(|a| planner.plan_fft(n[a], FftDirection::Forward));
        let inv = std::array::from_fn(|a| planner.plan_fft(n[a], FftDirection::Inverse));
        Fft3 { n, fwd, inv }
    }

    /// Shared plans for a grid shape.
    pub fn for_grid(grid: &Grid3) -> Arc<Fft3> {
        let mut cache = CACHE.lock().expect("fft plan cache poisoned");
        cache.entry(grid.n).or_insert_with(|| Arc::new(Fft3::new(grid.n))).clone()
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalized forward transform `Σ_x e^{−2πi k·x/n} f(x)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    /// Inverse transform including the `1/N` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
        let s = 1.0 / self.len() as f64;
        data.par_iter_mut().for_each(|c| *c *= s);
    }

    fn run(&self, data: &mut [Complex64], plans: &[Plan; 3]) {
        assert_eq!(data.len(), self.len(), "buffer does not match the FFT shape");
        let [n0, n1, n2] = self.n;
        // Last axis: contiguous lines.
        data.par_chunks_mut(n2).for_each(|line| plans[2].process(line));
        // Middle axis: strided within each slab.
        data.par_chunks_mut(n1 * n2).for_each(|slab| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n1];
            for k in 0..n2 {
                for j in 0..n1 {
                    buf[j] = slab[j * n2 + k];
                }
                plans[1].process(&mut buf);
                for j in 0..n1 {
                    slab[j * n2 + k] = buf[j];
                }
            }
        });
        // First axis: transpose so lines become contiguous.
        let plane = n1 * n2;
        let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
        t.par_chunks_mut(n0).enumerate().for_each(|(jk, line)| {
            for i in 0..n0 {
                line[i] = data[i * plane + jk];
            }
            plans[0].process(line);
        });
        data.par_chunks_mut(plane).enumerate().for_each(|(i, slab)| {
            for jk in 0..plane {
                slab[jk] = t[jk * n0 + i];
            }
        });
    }
}
