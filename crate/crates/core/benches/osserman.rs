//! Serial versus rayon-parallel execution of the sampling checks.
//!
//! Build with `--no-default-features` to see the sequential fallback: the
//! "parallel" rows then run on one thread as well.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use osserman_core::catalog::*;
use osserman_core::exec::Execution;
use osserman_core::metric::{check_metric_projective_osserman, modified_extension};
use osserman_core::model::{check_affine_projective_osserman, CheckConfig, DirectionSampler};
use osserman_core::suite::{run_suite, CheckName, SuiteOptions};

const MODES: [(&str, Execution); 2] = [
    ("serial", Execution::Serial),
    ("parallel", Execution::Parallel),
];

fn config(execution: Execution) -> CheckConfig {
    CheckConfig {
        execution,
        ..CheckConfig::default()
    }
}

fn affine_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("affine_projective_osserman");
    let model = build_quaternion_model(2, [1.0, 0.25, 0.5, 0.75], 1.0).unwrap();
    let sampler = DirectionSampler::new(model.dim(), 1);
    for n in [200, 1000] {
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |b, &n| {
                b.iter(|| {
                    check_affine_projective_osserman(&model, &sampler, n, &config(mode)).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn metric_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("metric_projective_osserman");
    let g = modified_extension(&build_nilpotent_connection(3, 2, 4).unwrap());
    let points: Vec<Vec<f64>> = (0..4)
        .map(|i| (0..6).map(|j| 0.1 * (i + j) as f64 - 0.3).collect())
        .collect();
    for (label, mode) in MODES {
        group.bench_function(label, |b| {
            b.iter(|| {
                check_metric_projective_osserman(&g, &points, 1, 100, 3, &config(mode)).unwrap()
            })
        });
    }
    group.finish();
}

fn full_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("suite_all");
    group.sample_size(10);
    for (label, execution) in MODES {
        let opts = SuiteOptions {
            seed: 42,
            execution,
            ..SuiteOptions::default()
        };
        group.bench_function(label, |b| b.iter(|| run_suite(&CheckName::ALL, &opts)));
    }
    group.finish();
}

criterion_group!(benches, affine_check, metric_check, full_suite);
criterion_main!(benches);
