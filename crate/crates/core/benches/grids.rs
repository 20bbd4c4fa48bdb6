//! Data-parallel grid workloads benched against their sequential fallback.
//!
//! The inner loops here are the library's hot paths: solving one trajectory
//! per initial direction (non-conjugation grids), evaluating the phase-offset
//! family (oscillation classification), and building frames over a corpus.
//! With the default `parallel` feature, `batch::map` runs on rayon;
//! `batch::map_seq` is the reference path. Run with
//! `cargo bench -p planode` and, for a single-threaded build of the same
//! workloads, `cargo bench -p planode --no-default-features`.

use criterion::{criterion_group, criterion_main, Criterion};
use planode::batch;
use planode::ode::{solve_system, SolveOptions, SystemSpec};
use planode::oscillation::{classify_oscillation, fundamental_frame, OscillationOptions};
use rand::SeedableRng;

fn init_grid_workload(c: &mut Criterion) {
    let sys = SystemSpec::parse("0", "sin(t)^2 + 0.1", "cos(t)^2 + 0.1", "0", 0.0).unwrap();
    let opts = SolveOptions::with_tol(1e-7);
    let angles: Vec<f64> = (0..16).map(|k| std::f64::consts::PI * k as f64 / 16.0).collect();
    let work = |beta: f64| {
        let tr = solve_system(&sys, (beta.cos(), beta.sin()), (0.0, 40.0), &opts).unwrap();
        (
            planode::ode::zero_sets(&tr, 0, 1e-9).len(),
            planode::ode::zero_sets(&tr, 1, 1e-9).len(),
        )
    };
    let mut g = c.benchmark_group("init_grid");
    g.sample_size(10);
    g.bench_function("batched", |b| b.iter(|| batch::map(angles.clone(), work)));
    g.bench_function("sequential", |b| b.iter(|| batch::map_seq(angles.clone(), work)));
    g.finish();
}

fn frame_corpus_workload(c: &mut Criterion) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let systems: Vec<SystemSpec> =
        (0..8).map(|_| planode::corpus::random_smooth_system(&mut rng, 0.0)).collect();
    let opts = SolveOptions::with_tol(1e-8);
    let work = |sys: SystemSpec| {
        let f = fundamental_frame(&sys, (0.0, 30.0), &opts).unwrap();
        f.identity_residual
    };
    let mut g = c.benchmark_group("frame_corpus");
    g.sample_size(10);
    g.bench_function("batched", |b| b.iter(|| batch::map(systems.clone(), work)));
    g.bench_function("sequential", |b| b.iter(|| batch::map_seq(systems.clone(), work)));
    g.finish();
}

fn classify_end_to_end(c: &mut Criterion) {
    let sys = SystemSpec::parse("0", "cos(t)", "-cos(t)", "0", 0.0).unwrap();
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    g.bench_function("phase_system_h100", |b| {
        b.iter(|| classify_oscillation(&sys, 100.0, &OscillationOptions::default()).unwrap().class)
    });
    g.finish();
}

criterion_group!(benches, init_grid_workload, frame_corpus_workload, classify_end_to_end);
criterion_main!(benches);
