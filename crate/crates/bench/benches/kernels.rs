use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};

use rvn_bench::{simulation, snapshot};
use rvn_core::diagnostics::{energy_high_f, energy_phi, WeightSpec};
use rvn_core::geometry::{first_order_commutator, high_order_commutator, KLetter, KWord, PhasePoint};
use rvn_core::lpfourier::{forward, Grid3};
use rvn_core::profiles::to_profile;
use rvn_core::solver::{tricubic, Mode};

fn geometry(c: &mut Criterion) {
    let p = PhasePoint::new([0.4, -1.2, 0.7], [1.1, 0.3, -0.8]);
    c.bench_function("first_order_table", |b| {
        b.iter(|| first_order_commutator(black_box(2), KLetter::SvHat, black_box(3.0), &p))
    });
    let beta = KWord::new(vec![KLetter::from_index(3), KLetter::from_index(11)]);
    c.bench_function("second_order_table", |b| {
        b.iter(|| high_order_commutator(black_box(5), &beta, black_box(3.0), &p, 2).expect("order 2"))
    });
}

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_forward");
    for n in [16, 32] {
        let grid = Grid3::cube(n, 8.0).expect("valid grid");
        let data: Vec<f64> = (0..grid.len()).map(|i| (i as f64 * 0.37).sin()).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &data, |b, d| b.iter(|| forward(&grid, black_box(d))));
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    group.sample_size(10);
    for mode in [Mode::FreeTransport, Mode::LinearCoupled, Mode::Coupled] {
        let sim = simulation(8, mode);
        group.bench_function(format!("{mode:?}_8"), |b| {
            b.iter_batched(|| sim.clone(), |mut s| s.step().expect("stable"), BatchSize::LargeInput)
        });
    }
    group.finish();

    let sim = simulation(12, Mode::Coupled);
    let row: Vec<f64> = (0..sim.f.v.len()).map(|iv| sim.f.at(0, iv)).collect();
    c.bench_function("tricubic_12", |b| b.iter(|| tricubic(&sim.f.v, &row, black_box([0.31, -0.72, 1.05]))));
    c.bench_function("to_profile_12", |b| b.iter(|| to_profile(black_box(&sim.f), 2.0)));
}

fn diagnostics(c: &mut Criterion) {
    let mut group = c.benchmark_group("energies_8");
    group.sample_size(10);
    let snap = snapshot(8);
    group.bench_function("high_f", |b| {
        b.iter_batched(
            || snap.clone(),
            |mut s| energy_high_f(&mut s, &WeightSpec::default(), 1, Mode::Coupled).expect("order 1"),
            BatchSize::LargeInput,
        )
    });
    group.bench_function("phi", |b| {
        b.iter_batched(|| snap.clone(), |mut s| energy_phi(&mut s, Mode::Coupled).expect("nonresonant"), BatchSize::LargeInput)
    });
    group.finish();
}

criterion_group!(benches, geometry, spectral, solver, diagnostics);
criterion_main!(benches);
