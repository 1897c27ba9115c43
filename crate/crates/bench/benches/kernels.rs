use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use walktrace_core::expander::{is_rc_expander, Mode};
use walktrace_core::hamilton;
use walktrace_core::mixing::{evolve, Distribution};
use walktrace_core::models::sample_gnp;
use walktrace_core::walk::{hitting_times, run_walk, trace, CompleteGraph, HittingOptions, Laziness, Parity, WalkTable};
use walktrace_core::{structure, SeedStream};

fn walks(c: &mut Criterion) {
    let mut group = c.benchmark_group("walk");
    for n in [1_000, 10_000] {
        let steps = 10 * n;
        group.bench_with_input(BenchmarkId::new("complete", n), &n, |b, &n| {
            b.iter(|| run_walk(&CompleteGraph { n }, 0, steps, Laziness::None, SeedStream::new(1, 0)).unwrap())
        });
        let g = sample_gnp(n, 20.0 / n as f64, SeedStream::new(2, 0)).unwrap();
        let table = WalkTable::new(&g);
        group.bench_with_input(BenchmarkId::new("gnp", n), &n, |b, _| {
            b.iter(|| run_walk(&table, 0, steps, Laziness::Half, SeedStream::new(1, 0)).unwrap())
        });
    }
    group.finish();
}

fn hitting(c: &mut Criterion) {
    let n = 300;
    let w = run_walk(&CompleteGraph { n }, 0, 4 * n * 6, Laziness::None, SeedStream::new(3, 0)).unwrap();
    let opts = HittingOptions::default();
    c.bench_function("hitting_times/complete(300)", |b| b.iter(|| hitting_times(black_box(&w), 1, &opts)));
}

fn structure_checks(c: &mut Criterion) {
    let g = sample_gnp(500, 0.05, SeedStream::new(4, 0)).unwrap();
    c.bench_function("vertex_connectivity/gnp(500,0.05)", |b| b.iter(|| structure::vertex_connectivity(black_box(&g))));
    c.bench_function("perfect_matching/gnp(500,0.05)", |b| b.iter(|| structure::perfect_matching(black_box(&g))));
}

fn hamiltonicity(c: &mut Criterion) {
    let g = sample_gnp(1000, 0.02, SeedStream::new(5, 0)).unwrap();
    c.bench_function("posa/gnp(1000,0.02)", |b| {
        b.iter(|| hamilton::posa_longest_path(black_box(&g), SeedStream::new(6, 0), hamilton::default_budget(g.n())))
    });
    let small = sample_gnp(18, 0.3, SeedStream::new(7, 0)).unwrap();
    c.bench_function("hamilton_dp/gnp(18,0.3)", |b| b.iter(|| hamilton::hamilton_cycle_dp(black_box(&small))));
}

fn expansion(c: &mut Criterion) {
    let n = 1000;
    let w = run_walk(&CompleteGraph { n }, 0, 2 * n * 7, Laziness::None, SeedStream::new(8, 0)).unwrap();
    let g = trace(&w, w.len(), Parity::All).simplify();
    c.bench_function("rc_expander_sampled/trace(1000)", |b| {
        b.iter(|| is_rc_expander(black_box(&g), n / 4, 2.0, Mode::Sampled { samples: 500 }, SeedStream::new(9, 0)).unwrap())
    });
}

fn mixing(c: &mut Criterion) {
    let g = sample_gnp(2000, 0.05, SeedStream::new(10, 0)).unwrap();
    let mu = Distribution::point(2000, 0);
    c.bench_function("evolve/gnp(2000,0.05)x20", |b| b.iter(|| evolve(black_box(&g), &mu, 20)));
}

criterion_group!(benches, walks, hitting, structure_checks, hamiltonicity, expansion, mixing);
criterion_main!(benches);
