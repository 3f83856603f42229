use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qpd_core::counters::a_counter;
use qpd_core::verify::{
    builtin_registry, family_series, mine_with_series, verify_claims, MineOptions, VerifyOptions,
};
use qpd_core::Parallelism;

const MODES: [(&str, Parallelism); 2] = [
    ("sequential", Parallelism::Sequential),
    ("parallel", Parallelism::Parallel),
];

fn batch_verification(c: &mut Criterion) {
    let registry = builtin_registry();
    let mut group = c.benchmark_group("verify_registry");
    group.sample_size(10);
    for (name, mode) in MODES {
        let opts = VerifyOptions {
            parallelism: mode,
            ..VerifyOptions::new(3000)
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| verify_claims(black_box(&registry), opts).unwrap())
        });
    }
    group.finish();
}

fn counter_tables(c: &mut Criterion) {
    let counter = a_counter(3).unwrap();
    let mut group = c.benchmark_group("count_a_table");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| counter.table(black_box(200_000), mode))
        });
    }
    group.finish();
}

fn miner(c: &mut Criterion) {
    let registry = builtin_registry();
    let series = family_series(Some(2), 4, 20_000).unwrap();
    let mut group = c.benchmark_group("mine_pd2_mod4");
    group.sample_size(10);
    for (name, mode) in MODES {
        let opts = MineOptions {
            parallelism: mode,
            ..MineOptions::new(2, 4, 96, 20_000)
        };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mine_with_series(&opts, &registry, black_box(&series)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, batch_verification, counter_tables, miner);
criterion_main!(benches);
