use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gossip_bench::{asymmetric_suite, hypercube_suite};
use gossip_core::quantum::{all_swaps, fixed_space_dimension, parse_state_literal};
use gossip_core::{
    build_asymmetric, check_invariants, min_chi, min_updates, orbit_decompose, product,
    quantum_simulate, SearchMode,
};

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("product");
    for (m, s) in hypercube_suite(5) {
        g.bench_with_input(BenchmarkId::new("hypercube", 1usize << m), &s, |b, s| {
            b.iter(|| product(black_box(s)))
        });
    }
    for (n, s) in asymmetric_suite(&[5, 12, 24, 40]) {
        g.bench_with_input(BenchmarkId::new("mixed", n), &s, |b, s| {
            b.iter(|| product(black_box(s)))
        });
    }
    g.finish();
}

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for n in [17usize, 100, 1000] {
        g.bench_with_input(BenchmarkId::new("mixed", n), &n, |b, &n| {
            b.iter(|| build_asymmetric(black_box(n)))
        });
    }
    g.finish();
    c.bench_function("invariants/mixed/12", |b| {
        let s = build_asymmetric(12);
        b.iter(|| check_invariants(black_box(&s)))
    });
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("sym/4", |b| {
        b.iter(|| min_updates(4, SearchMode::SymOnly, 10).unwrap())
    });
    g.bench_function("asym/3", |b| {
        b.iter(|| min_updates(3, SearchMode::SymAndAsym, 6).unwrap())
    });
    g.bench_function("asym/5", |b| {
        b.iter(|| min_updates(5, SearchMode::SymAndAsym, 12).unwrap())
    });
    g.finish();
}

fn compositions(c: &mut Criterion) {
    let mut g = c.benchmark_group("min_chi");
    for n in [6usize, 8, 10] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| min_chi(black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn quantum(c: &mut Criterion) {
    let mut g = c.benchmark_group("quantum");
    g.sample_size(10);
    for n in [2usize, 3, 4] {
        g.bench_with_input(BenchmarkId::new("orbits", n), &n, |b, &n| {
            b.iter(|| orbit_decompose(n).unwrap())
        });
    }
    for n in [2usize, 3] {
        g.bench_with_input(BenchmarkId::new("fixed_space", n), &n, |b, &n| {
            b.iter(|| fixed_space_dimension(n).unwrap())
        });
    }
    let n = 3;
    let swaps = all_swaps(n);
    let rho = parse_state_literal(n, "|010><010|").unwrap();
    g.bench_function("simulate/3", |b| {
        b.iter(|| quantum_simulate(n, &swaps, &rho).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    products,
    construction,
    search,
    compositions,
    quantum
);
criterion_main!(benches);
