//! Identity and table checks against the finite-difference and spectral
//! references, grouped into suites.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use rvn_core::geometry::{
    apply_fields, cone_factorization_residual, dtilde_derivative, dv_decomposition, first_order_commutator,
    high_order_commutator, DvVariant, KLetter, KWord, PhasePoint, VectorFieldId,
};
use rvn_core::lpfourier::cutoff::psi_k;
use rvn_core::lpfourier::{derivative, forward, half_wave, inverse_real, Grid3, C64};
use rvn_core::oracle::{fd_commutator, fd_vector_field, fd_word, gaussian_suite, literal, phase_samples, FDScheme};
use rvn_core::profiles::{from_profile, modified_profile, recover_from_modified, to_profile, CorrectionTerm};
use rvn_core::solver::{InitialData, Mode, SimConfig, Simulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Geometry,
    Profiles,
    Lpfourier,
    All,
}

impl Suite {
    fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Geometry, Suite::Lpfourier, Suite::Profiles],
            s => vec![s],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Profiles => "profiles",
            Suite::Lpfourier => "lpfourier",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Base sample count; the costlier checks use a fraction of it.
    pub samples: usize,
    /// Relative error injected into every coefficient-table evaluation.
    pub perturb: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    /// What `max_residual` measures.
    pub definition: &'static str,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub pass: bool,
}

const RELATIVE: &str = "max |table - reference| / max(|reference|, 1)";

fn check(
    suite: Suite,
    name: &'static str,
    definition: &'static str,
    samples: usize,
    residual: f64,
    tolerance: f64,
) -> Check {
    Check {
        suite: suite.name(),
        name,
        definition,
        samples,
        max_residual: residual,
        tolerance,
        pass: residual <= tolerance,
    }
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

fn scaled(samples: usize, divisor: usize, lo: usize, hi: usize) -> usize {
    (samples / divisor).clamp(lo, hi)
}

pub fn run(suite: Suite, opts: VerifyOptions) -> VerifyReport {
    let mut checks = Vec::new();
    for s in suite.expand() {
        match s {
            Suite::Geometry => checks.extend(geometry(opts)),
            Suite::Lpfourier => checks.extend(lpfourier(opts)),
            Suite::Profiles => checks.extend(profiles(opts)),
            Suite::All => unreachable!("expanded above"),
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { suite, seed: opts.seed, samples: opts.samples, checks, pass }
}

fn gamma(l: KLetter) -> VectorFieldId {
    VectorFieldId::Gamma(l)
}

fn geometry(opts: VerifyOptions) -> Vec<Check> {
    let g = Suite::Geometry;
    let bump = 1.0 + opts.perturb;
    let mut out = Vec::new();
    let funcs = gaussian_suite(opts.seed, 5);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < opts.samples {
        let t = rng.gen_range(0.0..100.0);
        let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-50.0..50.0));
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-10.0..10.0));
        let xv = x[0] * v[0] + x[1] * v[1] + x[2] * v[2];
        if x.iter().map(|c| c * c).sum::<f64>() + xv * xv < 0.75 {
            continue;
        }
        let p = PhasePoint::new(x, v);
        let gam = p.speed().hypot(1.0);
        let y2: f64 = (0..3).map(|i| (x[i] + v[i] / gam * t).powi(2)).sum();
        worst = worst.max(cone_factorization_residual(t, &p).abs() / (t * t + y2).max(1.0));
        count += 1;
    }
    out.push(check(
        g,
        "cone_factorization",
        "max |residual| / max(t² + |x + v̂t|², 1) where the cutoff is inactive",
        count,
        worst,
        1e-10,
    ));

    let pts = phase_samples(opts.seed, scaled(opts.samples, 100, 10, 1000), 10.0, 3.0, 3.0);
    let scheme = FDScheme::nested(1);
    let mut worst_dv = 0.0f64;
    let mut worst_vf = 0.0f64;
    let mut worst_mod = 0.0f64;
    let modulation = |t: f64, x: [f64; 3], v: [f64; 3]| literal::modulation(t, x, v);
    for (k, s) in pts.iter().enumerate() {
        let f = &funcs[k % funcs.len()];
        let h = f.phase_fn();
        let p = PhasePoint::new(s.x, s.v);
        let letters: Vec<f64> =
            KLetter::all().iter().map(|&l| fd_vector_field(&scheme, gamma(l), &h, s.t, s.x, s.v)).collect();
        for l in KLetter::all() {
            let exact = apply_fields(&[gamma(l)], s.t, &p, |x, v| f.eval(x, v)).expect("no time component");
            worst_vf = worst_vf.max(rel(bump * exact, letters[l.index()]));
            let (e1, e2, _) = dtilde_derivative(l, s.t, &p);
            let got = bump * (e1 * literal::modulation(s.t, s.x, s.v) + e2);
            worst_mod = worst_mod.max(rel(got, fd_vector_field(&scheme, gamma(l), &modulation, s.t, s.x, s.v)));
        }
        for variant in [DvVariant::First, DvVariant::Second] {
            let rebuilt = dv_decomposition(variant, s.t, &p).apply(|w| letters[w.0[0].index()]);
            for (j, r) in rebuilt.iter().enumerate() {
                let want = fd_vector_field(&scheme, VectorFieldId::Dv(j as u8), &h, s.t, s.x, s.v);
                worst_dv = worst_dv.max(rel(bump * r, want));
            }
        }
    }
    out.push(check(g, "vector_fields", "max |jet value - difference value| / max(|difference|, 1)", pts.len() * 17, worst_vf, 1e-5));
    out.push(check(g, "dv_decompositions", RELATIVE, pts.len() * 2, worst_dv, 1e-6));
    out.push(check(g, "modulation_derivative", RELATIVE, pts.len() * 17, worst_mod, 1e-5));

    let pts = phase_samples(opts.seed ^ 0x5a, scaled(opts.samples, 10_000, 2, 12), 5.0, 2.0, 2.5);
    let mut worst = 0.0f64;
    for (k, s) in pts.iter().enumerate() {
        let h = funcs[k % funcs.len()].phase_fn();
        let p = PhasePoint::new(s.x, s.v);
        let letters: Vec<f64> =
            KLetter::all().iter().map(|&l| fd_vector_field(&FDScheme::nested(1), gamma(l), &h, s.t, s.x, s.v)).collect();
        for i in 0..7 {
            for rho in KLetter::all() {
                let got = bump * first_order_commutator(i, rho, s.t, &p).apply(|w| letters[w.0[0].index()])[0];
                let want =
                    fd_commutator(&FDScheme::nested(2), VectorFieldId::X(i as u8), &[gamma(rho)], &h, s.t, s.x, s.v)
                        .expect("valid scheme");
                worst = worst.max(rel(got, want));
            }
        }
    }
    out.push(check(g, "first_order_commutators", RELATIVE, pts.len() * 7 * 17, worst, 1e-5));

    // Only (piece, word) pairs whose cutoffs overlap at the point are kept.
    let words = scaled(opts.samples, 200, 10, 50);
    let mut worst = 0.0f64;
    let mut checked = 0;
    while checked < words {
        let t = rng.gen_range(0.0..5.0);
        let x: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let dir: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let r = rng.gen_range(0.2..3.0) / dir.iter().map(|c| c * c).sum::<f64>().sqrt();
        let v = dir.map(|c| c * r);
        let p = PhasePoint::new(x, v);
        let i = rng.gen_range(0..7usize);
        let beta = KWord::new(vec![KLetter::from_index(rng.gen_range(0..17)), KLetter::from_index(rng.gen_range(0..17))]);
        let (top, lower) = high_order_commutator(i, &beta, t, &p, 2).expect("order 2 is supported");
        if top.is_zero() && lower.is_zero() {
            continue;
        }
        let h = funcs[checked % funcs.len()].phase_fn();
        let value = |w: &KWord| {
            let ids: Vec<VectorFieldId> = w.0.iter().map(|&l| gamma(l)).collect();
            fd_word(&FDScheme::nested(2), &ids, &h, t, x, v).expect("valid scheme")
        };
        let got = bump * (top.apply(value)[0] + lower.apply(value)[0]);
        let ids: Vec<VectorFieldId> = beta.0.iter().map(|&l| gamma(l)).collect();
        let want =
            fd_commutator(&FDScheme::nested(3), VectorFieldId::X(i as u8), &ids, &h, t, x, v).expect("valid scheme");
        worst = worst.max(rel(got, want));
        checked += 1;
    }
    out.push(check(g, "second_order_commutators", RELATIVE, checked, worst, 1e-4));
    out
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn lpfourier(opts: VerifyOptions) -> Vec<Check> {
    let s = Suite::Lpfourier;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..opts.samples {
        let r = 10f64.powf(rng.gen_range(-3.0..3.0));
        let sum: f64 = (-20..=20).map(|k| psi_k(&r, k)).sum();
        worst = worst.max((sum - 1.0).abs());
    }
    out.push(check(s, "partition_of_unity", "max |Σ_k ψ_k(r) - 1| over log-uniform r in [1e-3, 1e3]", opts.samples, worst, 1e-12));

    let grid = Grid3::cube(16, 4.0).expect("valid grid");
    let field: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let back = inverse_real(&grid, &forward(&grid, &field));
    out.push(check(s, "fft_roundtrip", "max |inverse(forward(u)) - u| on 16³ random data", grid.len(), max_abs_diff(&back, &field), 1e-12));

    let mut worst = 0.0f64;
    for _ in 0..8 {
        let m: [i32; 3] = std::array::from_fn(|_| rng.gen_range(-7..=7));
        let xi: [f64; 3] = m.map(|c| c as f64 * std::f64::consts::PI / grid.half_length);
        let phase = |p: [f64; 3]| xi[0] * p[0] + xi[1] * p[1] + xi[2] * p[2];
        let u: Vec<f64> = (0..grid.len()).map(|i| phase(grid.point(i)).sin()).collect();
        let hat = forward(&grid, &u);
        for axis in 0..3 {
            let d = inverse_real(&grid, &derivative(&grid, &hat, axis));
            let want: Vec<f64> = (0..grid.len()).map(|i| xi[axis] * phase(grid.point(i)).cos()).collect();
            worst = worst.max(max_abs_diff(&d, &want));
        }
    }
    out.push(check(s, "plane_wave_derivative", "max |spectral ∂ sin(ξ·x) - ξ cos(ξ·x)|, sub-Nyquist ξ", 24, worst, 1e-10));

    let hat: Vec<C64> = forward(&grid, &field);
    let (t1, t2) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
    let two = half_wave(&grid, &half_wave(&grid, &hat, t1), t2);
    let one = half_wave(&grid, &hat, t1 + t2);
    let worst = two.iter().zip(&one).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        / hat.iter().map(|c| c.norm()).fold(0.0, f64::max);
    out.push(check(s, "half_wave_group", "max |e^{-it₂|∇|}e^{-it₁|∇|}û - e^{-i(t₁+t₂)|∇|}û| / max|û|", grid.len(), worst, 1e-12));
    out
}

fn profiles(opts: VerifyOptions) -> Vec<Check> {
    let s = Suite::Profiles;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    let drift: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.4..0.4));
    let cfg = SimConfig {
        nx: 8,
        nv: 8,
        box_x: 6.0,
        box_v: 4.5,
        dt: 0.5,
        t_end: 2.0,
        mode: Mode::FreeTransport,
        amplitude: 1.0,
        data: InitialData { drift, wave_rate_amplitude: 0.5, ..InitialData::default() },
        ..SimConfig::default()
    };

    // The shifts drop Nyquist lines, so compare against the band-limited data.
    let (raw, _) = cfg.initial_state().expect("valid configuration");
    let f0 = from_profile(&to_profile(&raw, 0.0), 0.0);
    let t = rng.gen_range(0.5..5.0);
    let back = from_profile(&to_profile(&f0, t), t);
    out.push(check(
        s,
        "profile_roundtrip",
        "max |from_profile(to_profile(f)) - f| / max|f|",
        f0.data.len(),
        max_abs_diff(&back.data, &f0.data) / max_abs(&f0.data),
        1e-12,
    ));

    let mut sim = Simulation::new(cfg.clone()).expect("valid configuration");
    let mut worst = 0.0f64;
    while sim.t < cfg.t_end - 1e-9 {
        sim.step().expect("finite state");
        let g = to_profile(&sim.f, sim.t);
        worst = worst.max(max_abs_diff(&g.data, &f0.data) / max_abs(&f0.data));
    }
    out.push(check(s, "free_transport_profile_constancy", "max over steps of |g(t) - f₀| / max|f₀|", sim.step_count, worst, 1e-10));

    let lc = SimConfig { mode: Mode::LinearCoupled, ..cfg.clone() };
    let mut sim = Simulation::new(lc).expect("valid configuration");
    let grid = sim.f.x;
    let mut states = Vec::new();
    for stop in [1.0, 2.0] {
        while sim.t < stop - 1e-9 {
            sim.step().expect("finite state");
        }
        let g = to_profile(&sim.f, sim.t);
        let h = sim.wave.h_hat();
        let terms = [CorrectionTerm::base(&g)];
        let ht = modified_profile(&grid, &h, &terms, sim.t).expect("nonresonant");
        let rebuilt = recover_from_modified(&grid, &ht, &terms, sim.t, sim.wave.phi_hat[0]).expect("nonresonant");
        let scale = sim.wave.dphi_hat.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let err = rebuilt
            .phi_hat
            .iter()
            .zip(&sim.wave.phi_hat)
            .chain(rebuilt.dphi_hat.iter().zip(&sim.wave.dphi_hat))
            .enumerate()
            // φ̂ at ξ = 0 is carried separately.
            .filter(|(k, _)| *k != 0)
            .map(|(_, (a, b))| (a - b).norm())
            .fold(0.0, f64::max)
            / scale;
        states.push((h, ht, err));
    }
    let recovery = states.iter().map(|s| s.2).fold(0.0, f64::max);
    out.push(check(s, "modified_profile_recovery", "max |rebuilt (φ̂, ∂_tφ̂) - state| / max|∂_tφ̂|", 2, recovery, 1e-10));
    let mut worst = 0.0f64;
    let peak = (0..grid.len()).map(|i| (states[1].0[i] - states[0].0[i]).norm()).fold(0.0, f64::max);
    let mut counted = 0;
    for i in 0..grid.len() {
        let dh = (states[1].0[i] - states[0].0[i]).norm();
        if grid.is_nyquist(i) || dh <= 1e-3 * peak {
            continue;
        }
        worst = worst.max((states[1].1[i] - states[0].1[i]).norm() / dh);
        counted += 1;
    }
    out.push(check(
        s,
        "modified_profile_cancellation",
        "max over modes of |Δĥ̃| / |Δĥ| between t = 1 and t = 2 under the linear coupled flow",
        counted,
        worst,
        1e-6,
    ));
    out
}
