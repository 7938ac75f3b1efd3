use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use microrev::photonics::{self, estimate_gamma};
use microrev::sweeps::{find_extremum, gamma_map, SweepGrid};
use microrev::{BlochState, ChannelParams, Evaluation, ExperimentParams, Regime, ShotConfig, ThermalReservoir};

fn maps(c: &mut Criterion) {
    let mut group = c.benchmark_group("gamma_map_201");
    group.sample_size(10);
    let grid = SweepGrid::new(2.0, 0.5).unwrap();
    group.bench_function("closed", |b| b.iter(|| gamma_map(black_box(&grid), Regime::HeatRelease).unwrap()));
    let numeric = grid.with_evaluation(Evaluation::Numeric);
    group.bench_function("numeric", |b| b.iter(|| gamma_map(black_box(&numeric), Regime::HeatRelease).unwrap()));
    group.finish();
}

fn extremum(c: &mut Criterion) {
    let mut group = c.benchmark_group("extremum");
    group.sample_size(10);
    group.bench_function("release_beta2", |b| {
        b.iter(|| find_extremum(black_box(2.0), 0.5, Regime::HeatRelease).unwrap())
    });
    group.finish();
}

fn interferometer(c: &mut Criterion) {
    let x = ExperimentParams::new(0.6, 0.8, 1.1, 0.7).unwrap();
    c.bench_function("element_pipeline", |b| b.iter(|| photonics::pipeline_joint_state(black_box(&x)).unwrap()));

    let (i, f) = (BlochState::equator(0.0), BlochState::excited());
    let r = ThermalReservoir::new(2.0).unwrap();
    let ch = ChannelParams::new(0.5).unwrap();
    c.bench_function("twin_transition_probabilities", |b| {
        b.iter(|| photonics::transition_probabilities(black_box(&i), &f, &r, ch).unwrap())
    });
    let s = ShotConfig::new(100_000, 7).unwrap();
    c.bench_function("shot_gamma_1e5", |b| b.iter(|| estimate_gamma(black_box(0.31), 0.5, 1.0, &s).unwrap()));
}

criterion_group!(benches, maps, extremum, interferometer);
criterion_main!(benches);
