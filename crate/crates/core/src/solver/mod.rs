//! Split-step solver for the coupled kinetic / scalar-wave system on a
//! periodic spatial box.
//!
//! Each step is a Strang composition `L(Δt/2) N(Δt) L(Δt/2)`:
//!
//! * `L` is the linear coupled flow: every velocity slab is translated by
//!   `−v̂τ` spectrally, and the wave is advanced exactly with the source
//!   produced by that translating density (a `φ₁` exponential integrator
//!   per Fourier mode).
//! * `N` is the force step at frozen `(φ, ∂_tφ)`: a semi-Lagrangian update
//!   along velocity characteristics of `∂_t f = A(4f + v·∇_v f) + B·∇_v f`,
//!   with the dilation factor integrated along the characteristic.

mod interp;
mod snapshot;

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RvnError};
use crate::lpfourier::{inverse_real, Fft3, Grid3, C64};
use crate::profiles::{relativistic_velocity, DistributionGrid, Representation, VGrid, WaveState, VELOCITY_BLOCK};

pub use interp::tricubic;
pub use snapshot::Snapshot;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Free streaming of `f`; the wave is frozen.
    FreeTransport,
    /// Homogeneous wave; `f` is frozen and does not source it.
    FreeWave,
    /// Free streaming of `f` sourcing the wave, without the force step.
    LinearCoupled,
    /// The full nonlinear system.
    Coupled,
}

/// Gaussian initial data: `f₀ = ε e^{−|x|²/2σ_x²} e^{−|v−u|²/2σ_v²}` and
/// `φ₀ = ε a e^{−|x|²/2σ_φ²}`, `∂_tφ₀ = ε b e^{−|x|²/2σ_φ²}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub density_width: f64,
    pub velocity_width: f64,
    pub drift: [f64; 3],
    pub wave_amplitude: f64,
    pub wave_rate_amplitude: f64,
    pub wave_width: f64,
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData {
            density_width: 1.0,
            velocity_width: 0.6,
            drift: [0.0; 3],
            wave_amplitude: 1.0,
            wave_rate_amplitude: 0.0,
            wave_width: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Spatial points per axis.
    pub nx: usize,
    /// Velocity points per axis.
    pub nv: usize,
    /// Spatial box `[−L, L)³`.
    pub box_x: f64,
    /// Velocity box `[−V, V]³`.
    pub box_v: f64,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub mass: f64,
    /// Data amplitude `ε`.
    pub amplitude: f64,
    pub mode: Mode,
    pub data: InitialData,
    /// Steps between emitted snapshots.
    pub cadence: usize,
    pub n_max: usize,
    /// Bound on `max|v̂|·Δt / Δx`.
    pub cfl_safety: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            nx: 16,
            nv: 16,
            box_x: 12.0,
            box_v: 4.5,
            dt: 0.25,
            t_start: 0.0,
            t_end: 4.0,
            mass: 1.0,
            amplitude: 1e-2,
            mode: Mode::Coupled,
            data: InitialData::default(),
            cadence: 4,
            n_max: 1,
            cfl_safety: 2.0,
            seed: 0,
        }
    }
}

/// Boundary-to-peak ratio of the initial velocity profile that the box must beat.
const BOUNDARY_DENSITY: f64 = 1e-10;

impl SimConfig {
    pub fn x_grid(&self) -> Result<Grid3> {
        Grid3::cube(self.nx, self.box_x)
    }

    pub fn v_grid(&self) -> Result<VGrid> {
        VGrid::cube(self.nv, self.box_v)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(RvnError::Config(m));
        if self.nx < 2 || self.nv < 2 {
            return bad(format!("grids need at least 2 points per axis, got {} / {}", self.nx, self.nv));
        }
        if !(self.dt > 0.0) || !(self.t_end >= self.t_start) {
            return bad(format!("need dt > 0 and t_end ≥ t_start (dt {}, [{}, {}])", self.dt, self.t_start, self.t_end));
        }
        if self.mass != 0.0 && self.mass != 1.0 {
            return bad(format!("mass must be 0 or 1, got {}", self.mass));
        }
        if self.cadence == 0 {
            return bad("cadence must be positive".into());
        }
        let xg = self.x_grid()?;
        let vg = self.v_grid()?;
        let corner = [vg.coord(0, vg.n[0] - 1); 3];
        let vmax = norm3(relativistic_velocity(corner, self.mass));
        if vmax * self.dt > xg.spacing(0) * self.cfl_safety {
            return bad(format!(
                "max|v̂|·dt = {:.3} exceeds {} × spacing {:.3}",
                vmax * self.dt,
                self.cfl_safety,
                xg.spacing(0)
            ));
        }
        let d = &self.data;
        if d.density_width <= 0.0 || d.velocity_width <= 0.0 || d.wave_width <= 0.0 {
            return bad("initial-data widths must be positive".into());
        }
        let reach = self.box_v - d.drift.iter().fold(0.0f64, |m, u| m.max(u.abs()));
        if (-reach * reach / (2.0 * d.velocity_width * d.velocity_width)).exp() >= BOUNDARY_DENSITY {
            return bad(format!("velocity box {} too small for width {}", self.box_v, d.velocity_width));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.t_end - self.t_start) / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn initial_state(&self) -> Result<(DistributionGrid, WaveState)> {
        let xg = self.x_grid()?;
        let vg = self.v_grid()?;
        let d = self.data;
        let eps = self.amplitude;
        let f = DistributionGrid::from_fn(xg, vg, Representation::Physical, |x, v| {
            let dv = [v[0] - d.drift[0], v[1] - d.drift[1], v[2] - d.drift[2]];
            eps * (-dot3(x, x) / (2.0 * d.density_width.powi(2)) - dot3(dv, dv) / (2.0 * d.velocity_width.powi(2))).exp()
        });
        let bump: Vec<f64> =
            (0..xg.len()).map(|i| (-dot3(xg.point(i), xg.point(i)) / (2.0 * d.wave_width.powi(2))).exp()).collect();
        let phi: Vec<f64> = bump.iter().map(|b| eps * d.wave_amplitude * b).collect();
        let dphi: Vec<f64> = bump.iter().map(|b| eps * d.wave_rate_amplitude * b).collect();
        Ok((f, WaveState::from_physical(xg, self.t_start, &phi, &dphi)?))
    }
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `(e^{iθ} − 1)/(iθ)`.
fn phi1(theta: f64) -> C64 {
    if theta.abs() < 1e-4 {
        return C64::new(1.0 - theta * theta / 6.0, theta / 2.0 - theta.powi(3) / 24.0);
    }
    (C64::from_polar(1.0, theta) - 1.0) / C64::new(0.0, theta)
}

/// What the step observer sees.
pub struct StepView<'a> {
    pub t: f64,
    pub step: usize,
    pub f: &'a DistributionGrid,
    pub wave: &'a WaveState,
    pub mass: f64,
    /// True at snapshot cadence (and at the initial and final times).
    pub emit: bool,
}

impl StepView<'_> {
    pub fn snapshot(&self) -> Snapshot {
        Snapshot::new(self.t, self.mass, self.f.clone(), self.wave.clone())
    }
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub cfg: SimConfig,
    pub t: f64,
    pub step_count: usize,
    pub f: DistributionGrid,
    pub wave: WaveState,
    /// Characteristic feet that left the velocity box.
    pub clamped: u64,
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Simulation> {
        cfg.validate()?;
        let (f, wave) = cfg.initial_state()?;
        Ok(Simulation { t: cfg.t_start, cfg, step_count: 0, f, wave, clamped: 0 })
    }

    pub fn from_state(cfg: SimConfig, f: DistributionGrid, wave: WaveState) -> Result<Simulation> {
        cfg.validate()?;
        if f.x != cfg.x_grid()? || f.v != cfg.v_grid()? || wave.grid != f.x {
            return Err(RvnError::Config("state grids do not match the configuration".into()));
        }
        Ok(Simulation { t: wave.t, cfg, step_count: 0, f, wave, clamped: 0 })
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot::new(self.t, self.cfg.mass, self.f.clone(), self.wave.clone())
    }

    /// Source weight `m²/√(m² + |v|²)` at every velocity node.
    fn source_weights(&self) -> Vec<f64> {
        let m = self.cfg.mass;
        (0..self.f.v.len())
            .map(|iv| {
                let v = self.f.v.node(iv);
                let n = (m * m + dot3(v, v)).sqrt();
                if n == 0.0 {
                    0.0
                } else {
                    m * m / n
                }
            })
            .collect()
    }

    /// Advance by one step of size `dt`.
    pub fn step_by(&mut self, dt: f64) -> Result<()> {
        let mode = self.cfg.mode;
        match mode {
            Mode::FreeTransport | Mode::FreeWave | Mode::LinearCoupled => self.linear_flow(dt),
            Mode::Coupled => {
                self.linear_flow(0.5 * dt);
                self.force_step(dt);
                self.linear_flow(0.5 * dt);
            }
        }
        self.t += dt;
        self.wave.t = self.t;
        self.step_count += 1;
        self.check_finite()
    }

    pub fn step(&mut self) -> Result<()> {
        let remaining = self.cfg.t_end - self.t;
        let dt = if remaining < self.cfg.dt && remaining > 0.0 { remaining } else { self.cfg.dt };
        self.step_by(dt)
    }

    fn check_finite(&self) -> Result<()> {
        if self.f.data.iter().any(|v| !v.is_finite()) {
            return Err(RvnError::Instability { t: self.t, what: "non-finite density".into() });
        }
        if self.wave.phi_hat.iter().chain(&self.wave.dphi_hat).any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(RvnError::Instability { t: self.t, what: "non-finite wave field".into() });
        }
        Ok(())
    }

    /// Exact linear coupled flow over `tau`.
    fn linear_flow(&mut self, tau: f64) {
        let mode = self.cfg.mode;
        let grid = self.f.x;
        let n = grid.len();
        let fft = Fft3::for_grid(&grid);
        let xi: Vec<[f64; 3]> = (0..n).map(|i| grid.xi(i)).collect();
        let speed: Vec<f64> = xi.iter().map(|&k| norm3(k)).collect();
        let nyq: Vec<bool> = (0..n).map(|i| grid.is_nyquist(i)).collect();
        let transport = mode != Mode::FreeWave;
        let sourced = matches!(mode, Mode::LinearCoupled | Mode::Coupled);
        let weights = self.source_weights();
        let vw = self.f.v.weight();
        let vgrid = self.f.v;
        let mass = self.cfg.mass;

        let zeros = || vec![C64::new(0.0, 0.0); if sourced { n } else { 0 }];
        let source = if transport || sourced {
            // Fixed blocks of slabs summed in order keep the result independent of the thread count.
            let partials: Vec<Vec<C64>> = self
                .f
                .data
                .par_chunks_mut(n * VELOCITY_BLOCK)
                .enumerate()
                .map(|(b, block)| {
                    let mut acc = zeros();
                    for (j, slab) in block.chunks_mut(n).enumerate() {
                        let iv = b * VELOCITY_BLOCK + j;
                        let vh = relativistic_velocity(vgrid.node(iv), mass);
                        let mut buf: Vec<C64> = slab.iter().map(|&s| C64::new(s, 0.0)).collect();
                        fft.forward(&mut buf);
                        if sourced && weights[iv] != 0.0 {
                            let c = vw * weights[iv] * tau;
                            for i in 0..n {
                                if !nyq[i] {
                                    acc[i] += c * phi1(tau * (speed[i] - dot3(vh, xi[i]))) * buf[i];
                                }
                            }
                        }
                        if transport {
                            for i in 0..n {
                                buf[i] = if nyq[i] {
                                    C64::new(0.0, 0.0)
                                } else {
                                    buf[i] * C64::from_polar(1.0, -tau * dot3(vh, xi[i]))
                                };
                            }
                            fft.inverse(&mut buf);
                            for (s, c) in slab.iter_mut().zip(&buf) {
                                *s = c.re;
                            }
                        }
                    }
                    acc
                })
                .collect();
            let mut total = zeros();
            for part in partials {
                for (x, y) in total.iter_mut().zip(part) {
                    *x += y;
                }
            }
            total
        } else {
            Vec::new()
        };

        if mode == Mode::FreeTransport {
            return;
        }
        let mut u = self.wave.u_hat();
        let phi0_old = self.wave.phi_hat[0];
        let u0_old = u[0];
        for i in 1..n {
            let s = if sourced { source[i] } else { C64::new(0.0, 0.0) };
            u[i] = C64::from_polar(1.0, -tau * speed[i]) * (u[i] + s);
        }
        // The mean density is a neutralising background: on the torus ρ̂(0)
        // would drive ∂_tφ̂(0) linearly in time, a mode absent on ℝ³. The
        // zero mode therefore evolves freely.
        let phi0 = phi0_old + tau * u0_old;
        self.wave = WaveState::from_u_hat(grid, self.wave.t, &u, phi0);
    }

    /// Semi-Lagrangian force step at frozen wave fields.
    fn force_step(&mut self, dt: f64) {
        let grid = self.f.x;
        let vg = self.f.v;
        let (nx, nv) = (grid.len(), vg.len());
        let mass = self.cfg.mass;
        let dphi = self.wave.dphi();
        let grad: Vec<Vec<f64>> = (0..3).map(|a| inverse_real(&grid, &self.wave.grad_phi_hat(a))).collect();
        // Transpose to velocity-contiguous rows.
        let mut rows = vec![0.0; nx * nv];
        rows.par_chunks_mut(nv).enumerate().for_each(|(ix, row)| {
            for (iv, r) in row.iter_mut().enumerate() {
                *r = self.f.data[iv * nx + ix];
            }
        });
        let clamped = AtomicU64::new(0);
        let nodes: Vec<[f64; 3]> = (0..nv).map(|iv| vg.node(iv)).collect();
        let mut updated = vec![0.0; nx * nv];
        updated.par_chunks_mut(nv).enumerate().for_each(|(ix, out)| {
            let row = &rows[ix * nv..(ix + 1) * nv];
            let d = dphi[ix];
            let gp = [grad[0][ix], grad[1][ix], grad[2][ix]];
            if d == 0.0 && gp == [0.0; 3] {
                out.copy_from_slice(row);
                return;
            }
            // Characteristic speed c(v) = −(A v + B) and rate A.
            let field = |v: [f64; 3]| -> ([f64; 3], f64) {
                let vh = relativistic_velocity(v, mass);
                let a = d + dot3(vh, gp);
                let nrm = (mass * mass + dot3(v, v)).sqrt();
                let bc = if nrm == 0.0 { 0.0 } else { mass * mass / nrm };
                (std::array::from_fn(|k| -(a * v[k] + bc * gp[k])), a)
            };
            let mut lost = 0u64;
            for (iv, o) in out.iter_mut().enumerate() {
                let v = nodes[iv];
                let (c0, _) = field(v);
                let vm = std::array::from_fn(|k| v[k] - 0.5 * dt * c0[k]);
                let (cm, am) = field(vm);
                let foot = std::array::from_fn(|k| v[k] - dt * cm[k]);
                *o = match tricubic(&vg, row, foot) {
                    Some(val) => val * (4.0 * dt * am).exp(),
                    None => {
                        lost += 1;
                        0.0
                    }
                };
            }
            if lost > 0 {
                clamped.fetch_add(lost, Ordering::Relaxed);
            }
        });
        let lost = clamped.into_inner();
        if lost > 0 {
            log::warn!("{lost} characteristic feet left the velocity box at t = {:.3}", self.t);
            self.clamped += lost;
        }
        self.f.data.par_chunks_mut(nx).enumerate().for_each(|(iv, slab)| {
            for (ix, s) in slab.iter_mut().enumerate() {
                *s = updated[ix * nv + iv];
            }
        });
    }

    /// Run to `t_end`, handing every step to `observer`; `emit` marks the
    /// snapshot cadence.
    pub fn run<F>(&mut self, mut observer: F) -> Result<()>
    where
        F: FnMut(&StepView) -> Result<()>,
    {
        let total = self.cfg.steps();
        observer(&self.view(true))?;
        for k in 1..=total {
            self.step()?;
            let emit = k % self.cfg.cadence == 0 || k == total;
            observer(&self.view(emit))?;
        }
        Ok(())
    }

    fn view(&self, emit: bool) -> StepView<'_> {
        StepView { t: self.t, step: self.step_count, f: &self.f, wave: &self.wave, mass: self.cfg.mass, emit }
    }
}

/// Run a configuration from its initial data, collecting the emitted snapshots.
pub fn run(cfg: SimConfig) -> Result<Vec<Snapshot>> {
    let mut sim = Simulation::new(cfg)?;
    let mut out = Vec::new();
    sim.run(|view| {
        if view.emit {
            out.push(view.snapshot());
        }
        Ok(())
    })?;
    Ok(out)
}

/// Force field `K = v A + B` at every `(x, v)` node, stored like the density,
/// with `A = ∂_tφ + v̂·∇φ` and `B = m²∇φ/√(m²+|v|²)`, evaluated at `x`.
pub fn force_field(wave: &WaveState, vg: &VGrid, mass: f64) -> [DistributionGrid; 3] {
    let grid = wave.grid;
    let n = grid.len();
    let dphi = wave.dphi();
    let grad: Vec<Vec<f64>> = (0..3).map(|a| inverse_real(&grid, &wave.grad_phi_hat(a))).collect();
    std::array::from_fn(|k| {
        let mut out = DistributionGrid::zeros(grid, *vg, Representation::Physical);
        out.data.par_chunks_mut(n).enumerate().for_each(|(iv, slab)| {
            let v = vg.node(iv);
            let vh = relativistic_velocity(v, mass);
            let nrm = (mass * mass + dot3(v, v)).sqrt();
            let bc = if nrm == 0.0 { 0.0 } else { mass * mass / nrm };
            for (ix, s) in slab.iter_mut().enumerate() {
                let gp = [grad[0][ix], grad[1][ix], grad[2][ix]];
                let a = dphi[ix] + dot3(vh, gp);
                *s = a * v[k] + bc * gp[k];
            }
        });
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{from_profile, to_profile};

    fn small(mode: Mode) -> SimConfig {
        SimConfig {
            nx: 8,
            nv: 8,
            box_x: 6.0,
            box_v: 3.5,
            dt: 0.2,
            t_end: 1.0,
            mode,
            amplitude: 0.05,
            data: InitialData { velocity_width: 0.5, ..InitialData::default() },
            ..SimConfig::default()
        }
    }

    #[test]
    fn default_config_is_valid() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn phi1_series_matches_closed_form() {
        for th in [1e-5, 2e-4, 0.3, -1.7] {
            let exact = (C64::from_polar(1.0, th) - 1.0) / C64::new(0.0, th);
            assert!((phi1(th) - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn free_transport_matches_spectral_translate() {
        let cfg = small(Mode::FreeTransport);
        let mut sim = Simulation::new(cfg.clone()).unwrap();
        let g0 = to_profile(&sim.f, 0.0);
        sim.run(|_| Ok(())).unwrap();
        let exact = from_profile(&g0, sim.t);
        let err = exact.data.iter().zip(&sim.f.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn zero_density_stays_zero() {
        let mut cfg = small(Mode::Coupled);
        cfg.amplitude = 0.0;
        let (_, wave) = {
            let mut c = cfg.clone();
            c.amplitude = 0.1;
            c.initial_state().unwrap()
        };
        let f = DistributionGrid::zeros(cfg.x_grid().unwrap(), cfg.v_grid().unwrap(), Representation::Physical);
        let mut sim = Simulation::from_state(cfg, f, wave).unwrap();
        sim.run(|_| Ok(())).unwrap();
        assert!(sim.f.is_zero());
    }

    #[test]
    fn free_wave_conserves_energy() {
        let cfg = small(Mode::FreeWave);
        let mut sim = Simulation::new(cfg).unwrap();
        let e0 = sim.wave.energy();
        sim.run(|_| Ok(())).unwrap();
        assert!((sim.wave.energy() - e0).abs() < 1e-10 * e0);
    }

    #[test]
    fn plane_wave_phase_advances_exactly() {
        let cfg = small(Mode::FreeWave);
        let grid = cfg.x_grid().unwrap();
        let k = std::f64::consts::PI / grid.half_length;
        let phi: Vec<f64> = (0..grid.len()).map(|i| (k * grid.point(i)[0]).cos()).collect();
        let dphi: Vec<f64> = (0..grid.len()).map(|i| k * (k * grid.point(i)[0]).sin()).collect();
        let wave = WaveState::from_physical(grid, 0.0, &phi, &dphi).unwrap();
        let f = DistributionGrid::zeros(grid, cfg.v_grid().unwrap(), Representation::Physical);
        let mut sim = Simulation::from_state(cfg, f, wave).unwrap();
        sim.run(|_| Ok(())).unwrap();
        let t = sim.t;
        for (i, v) in sim.wave.phi().iter().enumerate() {
            let expect = (k * grid.point(i)[0] - k * t).cos();
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn static_source_increments_rate_per_mode() {
        // One linear step: ∂_tφ̂ gains Δt·ρ̂ up to O(Δt²).
        let mut cfg = small(Mode::LinearCoupled);
        cfg.data.wave_amplitude = 0.0;
        let dt = 1e-3;
        let mut sim = Simulation::new(cfg).unwrap();
        let weights = sim.source_weights();
        let f = from_profile(&to_profile(&sim.f, 0.0), 0.0);
        let rho = crate::profiles::density_hat(&f, &weights);
        sim.step_by(dt).unwrap();
        let scale = rho.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        assert_eq!(sim.wave.dphi_hat[0], C64::new(0.0, 0.0));
        for i in 1..rho.len() {
            let got = sim.wave.dphi_hat[i];
            assert!((got - dt * rho[i]).norm() < 10.0 * dt * dt * scale, "mode {i}");
        }
    }

    #[test]
    fn force_field_vanishes_without_wave() {
        let cfg = small(Mode::Coupled);
        let wave = WaveState::zeros(cfg.x_grid().unwrap(), 0.0);
        for k in force_field(&wave, &cfg.v_grid().unwrap(), 1.0) {
            assert!(k.is_zero());
        }
    }

    #[test]
    fn massless_force_has_no_gradient_push() {
        let mut cfg = small(Mode::Coupled);
        cfg.mass = 0.0;
        let (_, wave) = cfg.initial_state().unwrap();
        let vg = cfg.v_grid().unwrap();
        let k = force_field(&wave, &vg, 0.0);
        let dphi = wave.dphi();
        let grad: Vec<Vec<f64>> = (0..3).map(|a| inverse_real(&wave.grid, &wave.grad_phi_hat(a))).collect();
        let n = wave.grid.len();
        for iv in [0, 100, vg.len() - 1] {
            let v = vg.node(iv);
            let vt = relativistic_velocity(v, 0.0);
            for ix in [0, 77, n - 1] {
                let a = dphi[ix] + vt[0] * grad[0][ix] + vt[1] * grad[1][ix] + vt[2] * grad[2][ix];
                assert!((k[1].at(ix, iv) - a * v[1]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = small(Mode::Coupled);
        c.mass = 2.0;
        assert!(c.validate().is_err());
        let mut c = small(Mode::Coupled);
        c.box_v = 1.0;
        assert!(c.validate().is_err());
        let mut c = small(Mode::Coupled);
        c.dt = 10.0;
        assert!(c.validate().is_err());
    }
}
