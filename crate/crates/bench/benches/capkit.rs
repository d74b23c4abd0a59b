use std::hint::black_box;

use capkit_bench::distorted;
use capkit_core::rng::task_rng;
use capkit_core::{
    choquet_integral, extract_chain_probability, is_k_alternating, is_two_alternating, sandwich_probability, Budget,
    Chain, MeasurableFunction, PivotOrder,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn integral(c: &mut Criterion) {
    let mut group = c.benchmark_group("choquet_integral");
    for n in [4, 8, 12] {
        let cap = distorted(n, 1);
        let x = MeasurableFunction::random(cap.ground().clone(), &mut task_rng(1, 0));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| choquet_integral(black_box(&cap), black_box(&x)).unwrap())
        });
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    for n in [4, 6, 8] {
        let cap = distorted(n, 2);
        group.bench_with_input(BenchmarkId::new("two_alternating", n), &n, |b, _| {
            b.iter(|| is_two_alternating(black_box(&cap)))
        });
    }
    for (n, k) in [(3, 3), (4, 3), (3, 4)] {
        let cap = distorted(n, 3);
        group.bench_with_input(BenchmarkId::new(format!("order_{k}"), n), &n, |b, _| {
            b.iter(|| is_k_alternating(black_box(&cap), k, Budget::default()).unwrap())
        });
    }
    group.finish();
}

fn extraction(c: &mut Criterion) {
    let mut group = c.benchmark_group("extraction");
    group.sample_size(20);
    for n in [3, 4, 5] {
        let cap = distorted(n, 4);
        let chain = Chain::new(Vec::new()).unwrap();
        group.bench_with_input(BenchmarkId::new("chain", n), &n, |b, _| {
            b.iter(|| extract_chain_probability(black_box(&cap), &chain, PivotOrder::Lowest).unwrap())
        });
        let lower = cap.conjugate();
        group.bench_with_input(BenchmarkId::new("sandwich", n), &n, |b, _| {
            b.iter(|| sandwich_probability(black_box(&cap), &lower).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, integral, checks, extraction);
criterion_main!(benches);
