//! Kernels behind the acceptance checks: module builds, exact Gram matrices,
//! diffeomorphism arithmetic, fragmentation and operator matrices.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use diffvir_bench::{diffeo, field, module};
use diffvir_core::oracle::Oracle;
use diffvir_core::FragmentationCover;

fn module_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("module_build");
    for n in [6, 10, 14] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| module(1.0, 0.5, black_box(n))));
    }
    group.finish();
}

fn exact_gram(c: &mut Criterion) {
    let mut group = c.benchmark_group("shapovalov");
    group.sample_size(10);
    for level in [4, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, &level| {
            b.iter(|| Oracle::new(level).shapovalov_matrix(black_box(level)).unwrap())
        });
    }
    group.finish();
}

fn diffeo_arithmetic(c: &mut Criterion) {
    let a = diffeo(6, 0.2);
    let b = diffeo(4, 0.1);
    let f = field(3);
    c.bench_function("compose", |bench| bench.iter(|| black_box(&a).compose(black_box(&b))));
    c.bench_function("invert", |bench| bench.iter(|| black_box(&a).invert().unwrap()));
    c.bench_function("pushforward", |bench| bench.iter(|| black_box(&a).pushforward(black_box(&f)).unwrap()));
}

fn fragmentation(c: &mut Criterion) {
    let cover = FragmentationCover::default();
    let gamma = diffeo(4, 0.5 * cover.epsilon());
    let mut group = c.benchmark_group("fragment");
    group.sample_size(10);
    group.bench_function("default_cover", |b| b.iter(|| cover.fragment(black_box(&gamma)).unwrap()));
    group.finish();
}

fn operators(c: &mut Criterion) {
    let m = module(1.0, 0.5, 10);
    let f = field(3);
    let g = field(2).scale(0.05);
    c.bench_function("t_matrix/N10", |b| b.iter(|| m.t_matrix(black_box(&f)).unwrap()));
    c.bench_function("exp_t/N10", |b| b.iter(|| m.exp_t(black_box(&f), 0.5).unwrap()));
    c.bench_function("commutator_defect/N10", |b| b.iter(|| m.commutator_defect(&f, black_box(&g)).unwrap()));
    c.bench_function("covariance_defect/N10", |b| {
        b.iter(|| m.covariance_defect(black_box(&g), &field(1), 1, 7).unwrap())
    });
}

criterion_group!(benches, module_build, exact_gram, diffeo_arithmetic, fragmentation, operators);
criterion_main!(benches);
