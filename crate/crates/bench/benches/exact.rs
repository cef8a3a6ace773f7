use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cubehash::analysis::crossover;
use cubehash::codes::{golay_code, projection_code};
use cubehash::optsets::count_rsds;

fn golay_ddf(c: &mut Criterion) {
    let code = golay_code();
    c.bench_function("golay distance distribution", |b| b.iter(|| black_box(&code).dist_dist().unwrap()));
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_rsds");
    for size in [16usize, 24, 32] {
        group.bench_function(format!("size {size}"), |b| b.iter(|| count_rsds(size - 1, black_box(size)).unwrap()));
    }
    group.finish();
}

fn crossovers(c: &mut Criterion) {
    let golay = golay_code().dist_dist().unwrap();
    let proj = projection_code(23, 12).unwrap().dist_dist().unwrap();
    c.bench_function("crossover golay vs projection", |b| {
        b.iter(|| crossover("golay", black_box(&golay), "projection", black_box(&proj)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = golay_ddf, enumeration, crossovers
}
criterion_main!(benches);
