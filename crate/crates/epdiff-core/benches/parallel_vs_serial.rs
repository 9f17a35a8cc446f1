//! Data-parallel kernels benchmarked through both dispatch paths.
//!
//! With the default `parallel` feature the "parallel" entries go through
//! rayon and the "serial" entries through the always-sequential reference
//! path; built with --no-default-features both entries are sequential
//! (the feature fallback itself).

use criterion::{criterion_group, criterion_main, Criterion};
use epdiff_core::corpus::CorpusSpec;
use epdiff_core::flow_map::evolve_flow_map;
use epdiff_core::operators::{InertiaOperator, MultiplierSymbol};
use epdiff_core::solver::{run, InitialCondition, RunConfig};
use epdiff_core::spectral::FourierField;
use epdiff_core::{par, verify};

fn certified(bandwidth: usize) -> InertiaOperator {
    InertiaOperator::certified(MultiplierSymbol::sobolev(3.0), bandwidth).unwrap()
}

fn bench_q_decomposition_sweep(c: &mut Criterion) {
    let fields: Vec<FourierField> = CorpusSpec::new(128, 64).fields();
    let op = certified(128);
    let mut group = c.benchmark_group("q_decomposition_sweep_128x64");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            par::map(&fields, |u| {
                verify::q_decomposition_residual(u, &op).unwrap()
            })
        })
    });
    group.bench_function("serial", |b| {
        b.iter(|| {
            par::map_serial(&fields, |u| {
                verify::q_decomposition_residual(u, &op).unwrap()
            })
        })
    });
    group.finish();
}

fn bench_f_identity_sweep(c: &mut Criterion) {
    let fields: Vec<FourierField> = CorpusSpec::new(256, 64).fields();
    let mut group = c.benchmark_group("f_identity_sweep_256x64");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| par::map(&fields, |u| verify::f_identity_residual(u).unwrap()))
    });
    group.bench_function("serial", |b| {
        b.iter(|| par::map_serial(&fields, |u| verify::f_identity_residual(u).unwrap()))
    });
    group.finish();
}

fn bench_gronwall_rows(c: &mut Criterion) {
    let op = certified(64);
    let cfg = RunConfig {
        snapshot_every: Some(2),
        ..RunConfig::new(64, 1.0, InitialCondition::Sin)
    };
    let traj = run(&cfg, &op).unwrap();
    let snaps = traj.snapshots;
    let mut group = c.benchmark_group("stretching_term_rows");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| par::map(&snaps, |s| verify::q_direct(&s.u, &op).unwrap().sup_norm()))
    });
    group.bench_function("serial", |b| {
        b.iter(|| par::map_serial(&snaps, |s| verify::q_direct(&s.u, &op).unwrap().sup_norm()))
    });
    group.finish();
}

fn bench_flow_map(c: &mut Criterion) {
    // per-point integration is internally feature-dispatched
    let op = certified(64);
    let cfg = RunConfig {
        snapshot_every: Some(1),
        ..RunConfig::new(64, 0.5, InitialCondition::Sin)
    };
    let traj = run(&cfg, &op).unwrap();
    let mut group = c.benchmark_group("flow_map_evolution");
    group.sample_size(10);
    group.bench_function("512_points", |b| {
        b.iter(|| evolve_flow_map(&traj.snapshots, 512).unwrap())
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_q_decomposition_sweep,
    bench_f_identity_sweep,
    bench_gronwall_rows,
    bench_flow_map
);
criterion_main!(benches);
