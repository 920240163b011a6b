//! Pointwise decay scans of the wave field and of velocity averages.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, RvnError};
use crate::lpfourier::{derivative, inverse_real, C64};
use crate::oracle::{slope_fit, SlopeFit};
use crate::profiles::{DistributionGrid, Representation, VGrid, WaveState};
use crate::solver::tricubic;

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldDecayRow {
    pub t: f64,
    /// `sup_x |∇^α ∂_tφ| + |∇^α ∇φ|`.
    pub sup: f64,
    /// `(1+t) sup_x (1 + ||t| − |x||)^{|α|+1} (|∇^α ∂_tφ| + |∇^α ∇φ|)`.
    pub weighted: f64,
}

/// All spectral derivatives of order `order` of one field (raw coefficients).
fn derivative_family(w: &WaveState, hat: &[C64], order: usize) -> Vec<Vec<C64>> {
    let mut fam = vec![hat.to_vec()];
    for _ in 0..order {
        fam = fam.iter().flat_map(|h| (0..3).map(|a| derivative(&w.grid, h, a)).collect::<Vec<_>>()).collect();
    }
    fam
}

/// Field magnitudes for `|α| = order ≤ 2`, tensors in the Frobenius norm.
pub fn decay_scan_field(wave: &WaveState, order: usize) -> Result<FieldDecayRow> {
    if order > 2 {
        return Err(RvnError::OrderOverflow { order, max: 2 });
    }
    let grid = wave.grid;
    let n = grid.len();
    let mut dt_sq = vec![0.0; n];
    let mut dx_sq = vec![0.0; n];
    for h in derivative_family(wave, &wave.dphi_hat, order) {
        for (s, v) in dt_sq.iter_mut().zip(inverse_real(&grid, &h)) {
            *s += v * v;
        }
    }
    for a in 0..3 {
        for h in derivative_family(wave, &wave.grad_phi_hat(a), order) {
            for (s, v) in dx_sq.iter_mut().zip(inverse_real(&grid, &h)) {
                *s += v * v;
            }
        }
    }
    let t = wave.t;
    let mut sup = 0.0f64;
    let mut weighted = 0.0f64;
    for i in 0..n {
        let m = dt_sq[i].sqrt() + dx_sq[i].sqrt();
        let r = norm3(grid.point(i));
        sup = sup.max(m);
        weighted = weighted.max((1.0 + (t.abs() - r).abs()).powi(order as i32 + 1) * m);
    }
    Ok(FieldDecayRow { t, sup, weighted: (1.0 + t.abs()) * weighted })
}

/// Log–log slope of the unweighted field sup over `window`.
pub fn field_decay_fit(rows: &[FieldDecayRow], window: Option<(f64, f64)>) -> Result<SlopeFit> {
    let series: Vec<(f64, f64)> = rows.iter().map(|r| (r.t, r.sup)).collect();
    slope_fit(&series, window)
}

/// Sup over sample points of `(∫|f|^p dv)^{1/p}` for `p = 1, 2`, or of
/// `|∇_y ∫|f|^p dv|^{1/p}` when `order = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub t: f64,
    pub p1: f64,
    pub p2: f64,
}

/// Evaluation directions `z = y/t` on a cell-centred lattice of the ball
/// of radius `max|v̂|` over the velocity box, `n` points per axis.
pub fn direction_lattice(v: &VGrid, n: usize) -> Vec<[f64; 3]> {
    let c = v.half_width;
    let zmax = c * 3f64.sqrt() / (1.0 + 3.0 * c * c).sqrt();
    let h = 2.0 * zmax / n as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let z = [-zmax + (i as f64 + 0.5) * h, -zmax + (j as f64 + 0.5) * h, -zmax + (k as f64 + 0.5) * h];
                if norm3(z) < zmax {
                    out.push(z);
                }
            }
        }
    }
    out
}

/// Profile values with the velocity index fastest, one row per `x` node.
fn x_major(g: &DistributionGrid) -> Vec<f64> {
    let (nx, nv) = (g.slab_len(), g.v.len());
    let mut out = vec![0.0; nx * nv];
    for iv in 0..nv {
        for (ix, s) in g.slab(iv).iter().enumerate() {
            out[ix * nv + iv] = *s;
        }
    }
    out
}

/// `(∫|f|dv, ∫|f|²dv)` at `y` and time `t > 0` from the profile, by the
/// substitution `v ↦ w = y − v̂t`: with `z = (y − w)/t`,
/// `∫|f(t, y, v)|^p dv = t⁻³ Σ_w |g(w, z/√(1−|z|²))|^p (1−|z|²)^{−5/2} Δx³`.
fn moments_at(g: &DistributionGrid, rows: &[f64], points: &[[f64; 3]], y: [f64; 3], t: f64) -> (f64, f64) {
    let nv = g.v.len();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (ix, w) in points.iter().enumerate() {
        let z: [f64; 3] = std::array::from_fn(|a| (y[a] - w[a]) / t);
        let s = 1.0 - (z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
        if s <= 0.0 {
            continue;
        }
        let root = s.sqrt();
        let v = z.map(|c| c / root);
        let Some(val) = tricubic(&g.v, &rows[ix * nv..(ix + 1) * nv], v) else {
            continue;
        };
        let jac = s.powf(-2.5);
        m1 += val.abs() * jac;
        m2 += val * val * jac;
    }
    let c = g.x.cell_volume() / (t * t * t);
    (m1 * c, m2 * c)
}

/// One density-decay row at time `t` for `order ∈ {0, 1}`; the gradient is
/// a central difference in `y` with step `10⁻³(1 + t)`.
pub fn density_sup(g: &DistributionGrid, t: f64, order: usize, directions: &[[f64; 3]]) -> Result<DensityRow> {
    if g.repr != Representation::Profile {
        return Err(RvnError::Config("density scans read the profile".into()));
    }
    if t <= 0.0 {
        return Err(RvnError::NonPositive(t));
    }
    if order > 1 {
        return Err(RvnError::OrderOverflow { order, max: 1 });
    }
    let rows = x_major(g);
    let points: Vec<[f64; 3]> = (0..g.slab_len()).map(|i| g.x.point(i)).collect();
    let h = 1e-3 * (1.0 + t);
    let vals: Vec<(f64, f64)> = directions
        .par_iter()
        .map(|z| {
            let y = z.map(|c| c * t);
            if order == 0 {
                let (a, b) = moments_at(g, &rows, &points, y, t);
                return (a, b.sqrt());
            }
            let mut d1 = [0.0; 3];
            let mut d2 = [0.0; 3];
            for a in 0..3 {
                let mut yp = y;
                let mut ym = y;
                yp[a] += h;
                ym[a] -= h;
                let (p1, p2) = moments_at(g, &rows, &points, yp, t);
                let (m1, m2) = moments_at(g, &rows, &points, ym, t);
                d1[a] = (p1 - m1) / (2.0 * h);
                d2[a] = (p2 - m2) / (2.0 * h);
            }
            (norm3(d1), norm3(d2).sqrt())
        })
        .collect();
    let p1 = vals.iter().map(|v| v.0).fold(0.0, f64::max);
    let p2 = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    Ok(DensityRow { t, p1, p2 })
}

/// Slope of the `p`-moment sup across rows.
pub fn density_decay_fit(rows: &[DensityRow], p: u8, window: Option<(f64, f64)>) -> Result<SlopeFit> {
    let series: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.t, if p == 1 { r.p1 } else { r.p2 }))
        .collect();
    slope_fit(&series, window)
}

/// Density-decay slope over a trajectory of profiles.
pub fn density_decay_scan(
    profiles: &[(f64, &DistributionGrid)],
    order: usize,
    p: u8,
    directions: &[[f64; 3]],
    window: Option<(f64, f64)>,
) -> Result<SlopeFit> {
    if p != 1 && p != 2 {
        return Err(RvnError::Config(format!("moment exponent {p} is not 1 or 2")));
    }
    let rows = profiles
        .iter()
        .map(|(t, g)| density_sup(g, *t, order, directions))
        .collect::<Result<Vec<_>>>()?;
    density_decay_fit(&rows, p, window)
}
