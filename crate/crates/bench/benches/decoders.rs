use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use seccf::protocol::{bp_decode, ml_decode};
use seccf_bench::DecodeFixture;

fn ml(c: &mut Criterion) {
    let mut group = c.benchmark_group("ml_decode");
    for k in [4usize, 8, 12] {
        let f = DecodeFixture::uniform(2 * k, k, 3.0, 5);
        group.bench_with_input(BenchmarkId::from_parameter(k), &f, |b, f| {
            b.iter(|| ml_decode(black_box(&f.y), &f.code, &f.channel, &f.e1, &f.e2).unwrap())
        });
    }
    group.finish();
}

fn bp(c: &mut Criterion) {
    let (f, h) = DecodeFixture::hamming(2.0, 9);
    c.bench_function("bp_decode/hamming", |b| {
        b.iter(|| bp_decode(black_box(&f.y), &f.code, &h, 50, &f.channel, &f.e1, &f.e2).unwrap())
    });
    c.bench_function("ml_decode/hamming", |b| {
        b.iter(|| ml_decode(black_box(&f.y), &f.code, &f.channel, &f.e1, &f.e2).unwrap())
    });
}

criterion_group!(benches, ml, bp);
criterion_main!(benches);
