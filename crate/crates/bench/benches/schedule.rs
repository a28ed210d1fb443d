use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use portsched::{
    combined_optimize, heu_min, heu_opt, optimal_alignment, optimize, uniform_schedule, AlignConfig, OptimizerConfig,
};
use portsched_bench::{alignment_workloads, optimizer_workloads, Workload};

fn bench_optimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize");
    for w in optimizer_workloads() {
        let cfg = w.config();
        group.bench_with_input(BenchmarkId::from_parameter(&w.name), &w, |b, w| {
            b.iter(|| optimize(black_box(&w.matrix), &cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_alignment(c: &mut Criterion) {
    let mut group = c.benchmark_group("align");
    for w in alignment_workloads() {
        let schedule = uniform_schedule(&w.matrix, w.units).unwrap();
        group.bench_with_input(BenchmarkId::new("exact", &w.name), &schedule, |b, s| {
            b.iter(|| optimal_alignment(black_box(&w.matrix), s, &AlignConfig::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("heu-opt", &w.name), &schedule, |b, s| {
            b.iter(|| heu_opt(black_box(&w.matrix), s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("heu-min", &w.name), &schedule, |b, s| {
            b.iter(|| heu_min(black_box(s)))
        });
    }
    group.finish();
}

fn bench_combined(c: &mut Criterion) {
    let mut group = c.benchmark_group("combined");
    group.sample_size(10);
    let w = Workload::new(21, 5, 30, 20, 1);
    let cfg = OptimizerConfig::default();
    group.bench_function(&w.name, |b| {
        b.iter(|| combined_optimize(black_box(&w.matrix), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_optimize, bench_alignment, bench_combined);
criterion_main!(benches);
