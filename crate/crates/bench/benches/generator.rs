use std::hint::black_box;

use commbench::metrics::nmi_of;
use commbench::{generate, LfrConfig, Partition};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn generator(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate");
    group.sample_size(10);
    for n in [1000, 5000] {
        let config = LfrConfig::new(n, 15.0, 45, 2.0, 1.0, 0.3, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &config, |b, cfg| {
            b.iter(|| generate(black_box(cfg)).unwrap())
        });
    }
    group.finish();
}

fn nmi(c: &mut Criterion) {
    let n = 100_000;
    let a = Partition::new((0..n).map(|v| v % 97).collect()).unwrap();
    let b = Partition::new((0..n).map(|v| (v / 7) % 131).collect()).unwrap();
    c.bench_function("nmi/100000", |bench| bench.iter(|| nmi_of(black_box(&a), black_box(&b)).unwrap()));
}

criterion_group!(benches, generator, nmi);
criterion_main!(benches);
