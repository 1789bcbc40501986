use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use x2ds_bench::instance;
use x2ds_core::{build_decoding_set, dec2, enc2, FailurePattern};

fn bench_encode(c: &mut Criterion) {
    let mut group = c.benchmark_group("enc2");
    for len in [64 * 1024, 1024 * 1024] {
        let (padded, pads) = instance(len, 7);
        group.throughput(Throughput::Bytes(len as u64));
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, _| {
            b.iter(|| enc2(&padded, &pads).unwrap())
        });
    }
    group.finish();
}

fn bench_decode(c: &mut Criterion) {
    let mut group = c.benchmark_group("dec2");
    for len in [64 * 1024, 1024 * 1024] {
        let (padded, pads) = instance(len, 8);
        let matrix = enc2(&padded, &pads).unwrap();
        let failure = FailurePattern::new(1, 1).unwrap();
        let ds = build_decoding_set(&matrix, failure);
        group.throughput(Throughput::Bytes(len as u64));
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, _| {
            b.iter(|| dec2(&ds, failure, padded.original_length()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_encode, bench_decode);
criterion_main!(benches);
