use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qram_bench::{dense_configs, reference_scenario};
use qram_core::{allocate_interference_aware, build_schedule, classic_allocate, concave_majorant, partition_budget};
use std::hint::black_box;

fn allocation(c: &mut Criterion) {
    let s = reference_scenario(1);
    let budget = partition_budget(&s.pattern);
    let mut group = c.benchmark_group("allocate");
    group.bench_function("interference_aware", |b| {
        b.iter(|| allocate_interference_aware(black_box(&s.tasks), budget).unwrap())
    });
    group.bench_function("classic", |b| {
        b.iter(|| classic_allocate(black_box(&s.tasks), 1.0).unwrap())
    });
    group.finish();
}

fn hull(c: &mut Criterion) {
    let mut group = c.benchmark_group("concave_majorant");
    for n in [4, 16, 64] {
        let configs = dense_configs(n);
        group.bench_with_input(BenchmarkId::from_parameter(configs.len()), &configs, |b, cfgs| {
            b.iter(|| concave_majorant(black_box(cfgs)))
        });
    }
    group.finish();
}

fn schedule(c: &mut Criterion) {
    let s = reference_scenario(1);
    let res = allocate_interference_aware(&s.tasks, partition_budget(&s.pattern)).unwrap();
    c.bench_function("build_schedule", |b| {
        b.iter(|| build_schedule(black_box(&res), &s.tasks, &s.pattern, s.chunk))
    });
}

criterion_group!(benches, allocation, hull, schedule);
criterion_main!(benches);
