//! Distribution grids, free-streaming profiles and half-wave profiles.

mod gamma;
mod wave;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RvnError};
use crate::lpfourier::{Fft3, Grid3, C64};

pub use gamma::{expand_gamma_alpha, GammaExpansion, Multi};
pub use wave::{
    bilinear_t, density_hat, e_operator, modified_profile, modified_profile_rate, profile_rhs_g, profile_rhs_htilde,
    recover_from_modified, velocity_derivative_slab, velocity_gradient, CorrectionTerm, WaveState,
};

/// Velocity slabs per partial sum in parallel reductions. Partials are
/// added in block order, so sums do not depend on the thread count.
pub(crate) const VELOCITY_BLOCK: usize = 64;

/// `Σ_{iv < count}` of per-slab contributions of length `len`; `add`
/// accumulates slab `iv` into its buffer.
pub(crate) fn blocked_sum<F>(count: usize, len: usize, add: F) -> Vec<C64>
where
    F: Fn(usize, &mut [C64]) + Sync,
{
    let blocks = count.div_ceil(VELOCITY_BLOCK);
    let partials: Vec<Vec<C64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut local = vec![C64::new(0.0, 0.0); len];
            for iv in b * VELOCITY_BLOCK..((b + 1) * VELOCITY_BLOCK).min(count) {
                add(iv, &mut local);
            }
            local
        })
        .collect();
    let mut total = vec![C64::new(0.0, 0.0); len];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total
}

/// Cell-centred velocity lattice on `[−V, V]³`; nodes never hit `v = 0`
/// exactly when the per-axis count is even.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VGrid {
    pub n: [usize; 3],
    pub half_width: f64,
}

impl VGrid {
    pub fn new(n: [usize; 3], half_width: f64) -> Result<VGrid> {
        if n.contains(&0) {
            return Err(RvnError::Config(format!("velocity grid dimensions must be positive, got {n:?}")));
        }
        if half_width <= 0.0 || !half_width.is_finite() {
            return Err(RvnError::NonPositive(half_width));
        }
        Ok(VGrid { n, half_width })
    }

    pub fn cube(n: usize, half_width: f64) -> Result<VGrid> {
        VGrid::new([n; 3], half_width)
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_width / self.n[axis] as f64
    }

    /// Midpoint quadrature weight of every node.
    pub fn weight(&self) -> f64 {
        (0..3).map(|a| self.spacing(a)).product()
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing(axis)
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

    pub fn node(&self, idx: usize) -> [f64; 3] {
        let m = self.unravel(idx);
        std::array::from_fn(|a| self.coord(a, m[a]))
    }

    /// Fractional lattice position of a velocity along one axis.
    pub fn fractional(&self, axis: usize, v: f64) -> f64 {
        (v + self.half_width) / self.spacing(axis) - 0.5
    }
}

/// `v/√(m² + |v|²)`.
pub fn relativistic_velocity(v: [f64; 3], mass: f64) -> [f64; 3] {
    let n = (mass * mass + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n == 0.0 {
        return [0.0; 3];
    }
    v.map(|c| c / n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// The density `f(t, x, v)`.
    Physical,
    /// The profile `g(t, x, v) = f(t, x + v̂t, v)`.
    Profile,
}

/// Real values on the `x × v` tensor grid, stored velocity-major: each
/// velocity node owns one contiguous spatial slab.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionGrid {
    pub x: Grid3,
    pub v: VGrid,
    pub repr: Representation,
    pub data: Vec<f64>,
}

impl DistributionGrid {
    pub fn zeros(x: Grid3, v: VGrid, repr: Representation) -> Self {
        DistributionGrid { x, v, repr, data: vec![0.0; x.len() * v.len()] }
    }

    pub fn from_fn<F>(x: Grid3, v: VGrid, repr: Representation, f: F) -> Self
    where
        F: Fn([f64; 3], [f64; 3]) -> f64 + Sync,
    {
        let nx = x.len();
        let mut data = vec![0.0; nx * v.len()];
        data.par_chunks_mut(nx).enumerate().for_each(|(iv, slab)| {
            let vel = v.node(iv);
            for (ix, s) in slab.iter_mut().enumerate() {
                *s = f(x.point(ix), vel);
            }
        });
        DistributionGrid { x, v, repr, data }
    }

    pub fn slab_len(&self) -> usize {
        self.x.len()
    }

    pub fn slab(&self, iv: usize) -> &[f64] {
        let n = self.slab_len();
        &self.data[iv * n..(iv + 1) * n]
    }

    #[inline]
    pub fn at(&self, ix: usize, iv: usize) -> f64 {
        self.data[iv * self.slab_len() + ix]
    }

    /// `∫∫ f dx dv` by the lattice quadrature.
    pub fn mass(&self) -> f64 {
        self.data.iter().sum::<f64>() * self.x.cell_volume() * self.v.weight()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.data.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|v| v * v).sum::<f64>() * self.x.cell_volume() * self.v.weight()).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }
}

/// Translate every slab by `sign·v̂t` spectrally: the result at `x` is the
/// input at `x + sign·v̂t`. Nyquist lines are dropped so the output stays
/// real; band-limited inputs are reproduced exactly.
pub fn shift_slabs(f: &DistributionGrid, t: f64, sign: f64, mass: f64) -> Vec<f64> {
    let grid = f.x;
    let fft = Fft3::for_grid(&grid);
    let nx = grid.len();
    let xi: Vec<[f64; 3]> = (0..nx).map(|i| grid.xi(i)).collect();
    let nyq: Vec<bool> = (0..nx).map(|i| grid.is_nyquist(i)).collect();
    let mut out = vec![0.0; f.data.len()];
    out.par_chunks_mut(nx).enumerate().for_each(|(iv, slab)| {
        let vh = relativistic_velocity(f.v.node(iv), mass);
        let mut buf: Vec<C64> = f.slab(iv).iter().map(|&v| C64::new(v, 0.0)).collect();
        fft.forward(&mut buf);
        for (i, c) in buf.iter_mut().enumerate() {
            if nyq[i] {
                *c = C64::new(0.0, 0.0);
            } else {
                let ph = sign * t * (vh[0] * xi[i][0] + vh[1] * xi[i][1] + vh[2] * xi[i][2]);
                *c *= C64::from_polar(1.0, ph);
            }
        }
        fft.inverse(&mut buf);
        for (s, c) in slab.iter_mut().zip(&buf) {
            *s = c.re;
        }
    });
    out
}

/// `g(t, x, v) = f(t, x + v̂t, v)` (unit mass).
pub fn to_profile(f: &DistributionGrid, t: f64) -> DistributionGrid {
    DistributionGrid { x: f.x, v: f.v, repr: Representation::Profile, data: shift_slabs(f, t, 1.0, 1.0) }
}

/// `f(t, x, v) = g(t, x − v̂t, v)` (unit mass).
pub fn from_profile(g: &DistributionGrid, t: f64) -> DistributionGrid {
    DistributionGrid { x: g.x, v: g.v, repr: Representation::Physical, data: shift_slabs(g, t, -1.0, 1.0) }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Smooth, band-limited slab data: low Fourier modes only.
    fn band_limited(x: Grid3, v: VGrid) -> DistributionGrid {
        let w = std::f64::consts::PI / x.half_length;
        DistributionGrid::from_fn(x, v, Representation::Physical, |p, q| {
            let a = (w * p[0]).cos() + 0.5 * (2.0 * w * p[1] + 0.3).sin() * (w * p[2]).cos();
            a * (-(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]) / 2.0).exp() + 2.0
        })
    }

    #[test]
    fn profile_at_time_zero_is_identity() {
        let f = band_limited(Grid3::cube(8, 4.0).unwrap(), VGrid::cube(4, 2.0).unwrap());
        let g = to_profile(&f, 0.0);
        let err = f.data.iter().zip(&g.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-13);
    }

    #[test]
    fn round_trip_on_band_limited_data() {
        let f = band_limited(Grid3::cube(8, 4.0).unwrap(), VGrid::cube(4, 2.0).unwrap());
        let back = from_profile(&to_profile(&f, 3.7), 3.7);
        let err = f.data.iter().zip(&back.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12 * f.max_abs());
    }

    #[test]
    fn free_streaming_has_constant_profile() {
        let x = Grid3::cube(8, 4.0).unwrap();
        let v = VGrid::cube(4, 2.0).unwrap();
        let g0 = band_limited(x, v);
        for t in [0.5, 2.0, 11.0] {
            let f = from_profile(&g0, t);
            let g = to_profile(&f, t);
            let d: f64 = g.data.iter().zip(&g0.data).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(d <= 1e-8 * g0.l2_norm() / (x.cell_volume() * v.weight()).sqrt());
        }
    }
}
