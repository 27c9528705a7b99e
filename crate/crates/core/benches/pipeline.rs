//! Sequential vs rayon execution of the per-curve pipeline.
//!
//! Without the `parallel` feature both variants run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndhelix::generators::{general_helix, reference_battery, spiral_tangent_curve_e3};
use ndhelix::helix::classify_helix;
use ndhelix::{frenet_apparatus, CurveSamples, Execution, FrenetOptions, Thresholds};

const H: f64 = 1e-3;

fn options(execution: Execution) -> FrenetOptions {
    FrenetOptions {
        execution,
        ..FrenetOptions::default()
    }
}

fn e4_helix() -> CurveSamples {
    let profile = spiral_tangent_curve_e3(0.4, 0.04, 1.0).unwrap();
    general_helix(&[0.0, 0.0, 0.0, 1.0], 0.8_f64.acos(), &profile)
        .unwrap()
        .reparameterize_unit_speed(H)
        .unwrap()
}

fn frame_estimation(c: &mut Criterion) {
    let curve = e4_helix();
    let mut group = c.benchmark_group("frenet_apparatus_e4");
    for execution in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{execution:?}")), &execution, |b, &e| {
            b.iter(|| frenet_apparatus(black_box(&curve), &options(e)).unwrap())
        });
    }
    group.finish();
}

fn classification(c: &mut Criterion) {
    let curve = e4_helix();
    let mut group = c.benchmark_group("frenet_and_classify_e4");
    for execution in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{execution:?}")), &execution, |b, &e| {
            b.iter(|| {
                let fd = frenet_apparatus(black_box(&curve), &options(e)).unwrap();
                classify_helix(&fd, &Thresholds::default()).unwrap()
            })
        });
    }
    group.finish();
}

fn battery(c: &mut Criterion) {
    let curves: Vec<CurveSamples> = reference_battery(H, 0.05)
        .unwrap()
        .into_iter()
        .map(|c| c.samples)
        .collect();
    let mut group = c.benchmark_group("battery_12_curves");
    group.sample_size(10);
    for execution in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{execution:?}")), &execution, |b, &e| {
            b.iter(|| {
                e.map_items(&curves, |curve| {
                    let fd = frenet_apparatus(curve, &options(e)).unwrap();
                    classify_helix(&fd, &Thresholds::default()).unwrap().verdict
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, frame_estimation, classification, battery);
criterion_main!(benches);
