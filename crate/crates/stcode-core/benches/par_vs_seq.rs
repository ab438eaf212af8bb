//! Parallel vs sequential comparison for the two scan-heavy operations:
//! exhaustive column-subset verification and whole-code bandwidth
//! measurement.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stcode_core::{
    build_code_unverified, measure_bandwidth, measure_bandwidth_sequential, verify_mds,
    verify_mds_sequential, CodeParams, FieldSpec, PartitionMode, VerifyOptions,
};

fn code(n: usize, k: usize, alpha: usize) -> stcode_core::CodeDescriptor {
    build_code_unverified(CodeParams {
        n,
        k,
        alpha,
        field: FieldSpec::gf16(),
        partition_mode: PartitionMode::Kr,
        seed: 42,
    })
    .unwrap()
}

fn bench_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_mds");
    group.sample_size(10);
    let desc = code(14, 10, 3);
    let opts = VerifyOptions::default();
    group.bench_with_input(BenchmarkId::new("parallel", "14-10-3"), &desc, |b, d| {
        b.iter(|| verify_mds(d, &opts))
    });
    group.bench_with_input(BenchmarkId::new("sequential", "14-10-3"), &desc, |b, d| {
        b.iter(|| verify_mds_sequential(d, &opts))
    });
    group.finish();
}

fn bench_bandwidth(c: &mut Criterion) {
    let mut group = c.benchmark_group("measure_bandwidth");
    let desc = code(29, 25, 4);
    group.bench_with_input(BenchmarkId::new("parallel", "29-25-4"), &desc, |b, d| {
        b.iter(|| measure_bandwidth(d).unwrap())
    });
    group.bench_with_input(BenchmarkId::new("sequential", "29-25-4"), &desc, |b, d| {
        b.iter(|| measure_bandwidth_sequential(d).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_verify, bench_bandwidth);
criterion_main!(benches);
