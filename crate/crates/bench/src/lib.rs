//! Shared fixtures for the kernel benchmarks in `benches/kernels.rs`.

use rvn_core::solver::{InitialData, Mode, SimConfig, Simulation, Snapshot};

/// A small coupled configuration on an `n³ × n³` grid.
pub fn config(n: usize, mode: Mode) -> SimConfig {
    SimConfig {
        nx: n,
        nv: n,
        box_x: 8.0,
        box_v: 4.5,
        dt: 0.25,
        t_end: 1.0,
        mode,
        amplitude: 0.1,
        data: InitialData { drift: [0.3, -0.1, 0.2], wave_rate_amplitude: 0.5, ..InitialData::default() },
        ..SimConfig::default()
    }
}

pub fn simulation(n: usize, mode: Mode) -> Simulation {
    Simulation::new(config(n, mode)).expect("fixture configuration is valid")
}

/// A coupled snapshot one step into the run.
pub fn snapshot(n: usize) -> Snapshot {
    let mut sim = simulation(n, Mode::Coupled);
    sim.step().expect("fixture step is stable");
    sim.snapshot()
}
