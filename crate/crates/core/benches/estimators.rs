use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use lsxgc_core::evaluation::run_benchmark_with;
use lsxgc_core::simulator::{simulate_dataset, simulate_dataset_with, SimulationConfig};
use lsxgc_core::{AnalysisConfig, Execution, Method};

fn modes() -> Vec<Execution> {
    if cfg!(feature = "parallel") {
        vec![Execution::Sequential, Execution::Parallel]
    } else {
        vec![Execution::Sequential]
    }
}

fn mode_name(e: Execution) -> &'static str {
    match e {
        Execution::Sequential => "sequential",
        Execution::Parallel => "parallel",
    }
}

fn estimators(c: &mut Criterion) {
    let data = simulate_dataset(&SimulationConfig {
        n_realizations: 1,
        ..Default::default()
    })
    .unwrap();
    let ens = &data[0].ensemble;
    let cfg = AnalysisConfig::default();
    for method in Method::ALL {
        let mut group = c.benchmark_group(format!("matrix/{method}"));
        if matches!(method, Method::Te | Method::Mi) {
            group.sample_size(10);
        }
        for exec in modes() {
            group.bench_with_input(BenchmarkId::from_parameter(mode_name(exec)), &exec, |b, &exec| {
                b.iter(|| method.estimate(black_box(ens), &cfg, exec).unwrap())
            });
        }
        group.finish();
    }
}

fn pipeline(c: &mut Criterion) {
    let sim = SimulationConfig {
        n_realizations: 8,
        ..Default::default()
    };
    let data = simulate_dataset(&sim).unwrap();
    let cfg = AnalysisConfig::default();

    let mut group = c.benchmark_group("simulate_dataset/8");
    group.sample_size(10);
    for exec in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(mode_name(exec)), &exec, |b, &exec| {
            b.iter(|| simulate_dataset_with(black_box(&sim), exec).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("benchmark/lsxgc+gc/8");
    group.sample_size(10);
    for exec in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(mode_name(exec)), &exec, |b, &exec| {
            b.iter(|| run_benchmark_with(black_box(&data), &[Method::Lsxgc, Method::Gc], &cfg, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, estimators, pipeline);
criterion_main!(benches);
