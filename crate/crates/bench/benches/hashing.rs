use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use cubehash::codes::{golay_code, hamming_code, projection_code};
use cubehash::{run_experiment, ExperimentConfig};
use cubehash_bench::random_inputs;

fn hash_throughput(c: &mut Criterion) {
    let mut group = c.benchmark_group("hash_u64");
    let codes = [
        ("golay", golay_code()),
        ("hamming:4", hamming_code(4).unwrap()),
        ("projection:23,12", projection_code(23, 12).unwrap()),
    ];
    for (name, code) in &codes {
        let inputs = random_inputs(code.n(), 4096, 1);
        group.throughput(Throughput::Elements(inputs.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(name), &inputs, |b, xs| {
            b.iter(|| xs.iter().fold(0u64, |acc, &x| acc ^ code.hash_u64(black_box(x))))
        });
    }
    group.finish();
}

fn experiment(c: &mut Criterion) {
    let code = golay_code();
    let cfg = ExperimentConfig::new("golay", 1 << 10, 0.2, 200, 3);
    c.bench_function("experiment golay M=1024 200 trials", |b| {
        b.iter(|| run_experiment(&code, black_box(&cfg)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = hash_throughput, experiment
}
criterion_main!(benches);
