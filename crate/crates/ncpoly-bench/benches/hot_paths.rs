//! The three hot paths: exact norm computation, the correlation sweep, and
//! canonical-form recovery.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncpoly::{
    gowers_norm_poly, make_counterexample, max_correlation, Fp, NonClassicalPoly, SearchMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn bench_gowers_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("gowers_norm");
    for (p, k, n) in [(2u32, 4u32, 3usize), (2, 5, 2), (3, 5, 2)] {
        let fp = Fp::new(p).unwrap();
        let family = make_counterexample(fp, k, n).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("p{p}_k{k}_n{n}")),
            &family.poly,
            |b, poly| {
                b.iter(|| gowers_norm_poly(black_box(poly), k, 1 << 30).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_search_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("search_sweep");
    group.sample_size(10);
    for n in [3usize, 4] {
        let fp = Fp::new(2).unwrap();
        let family = make_counterexample(fp, 4, n).unwrap();
        let f = family.poly.eval_table().unwrap().to_complex();
        group.bench_with_input(BenchmarkId::from_parameter(format!("p2_d3_n{n}")), &f, |b, f| {
            b.iter(|| {
                max_correlation(black_box(f), 3, SearchMode::Exhaustive, 1 << 30, 0).unwrap()
            });
        });
    }
    group.finish();
}

fn bench_canonicalize(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonicalize");
    for (p, n) in [(2u32, 4usize), (3, 3)] {
        let fp = Fp::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let poly = NonClassicalPoly::random(fp, n, 3, 3, &mut rng).unwrap();
        let table = poly.eval_table().unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("p{p}_n{n}")),
            &table,
            |b, table| {
                b.iter(|| NonClassicalPoly::canonicalize(black_box(table)).unwrap());
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_gowers_norm, bench_search_sweep, bench_canonicalize);
criterion_main!(benches);
