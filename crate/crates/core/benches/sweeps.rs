use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use optoent::entanglement::optimized_series;
use optoent::exec::Execution;
use optoent::grid::{FrequencyGrid, Spacing};
use optoent::params::ParamSpec;
use optoent::stability::{detuning_grid, detuning_sweep};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spectrum(c: &mut Criterion) {
    let p = ParamSpec::fig1().build().unwrap().response();
    let mut group = c.benchmark_group("optimized-spectrum");
    for points in [64usize, 256] {
        let omegas = FrequencyGrid::new(1e-2, 3e7, points, Spacing::Log).unwrap().values();
        group.throughput(Throughput::Elements(points as u64));
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, points), &omegas, |b, w| {
                b.iter(|| optimized_series(black_box(&p), w, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn stability(c: &mut Criterion) {
    let sys = ParamSpec::table1().build().unwrap();
    let detunings = detuning_grid(&sys, 0.0, 0.078, 40);
    let mut group = c.benchmark_group("detuning-sweep");
    group.sample_size(10);
    group.throughput(Throughput::Elements(detunings.len() as u64));
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| detuning_sweep(black_box(&sys), &detunings, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, spectrum, stability);
criterion_main!(benches);
