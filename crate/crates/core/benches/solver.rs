use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use oncodp_core::oracle::monte_carlo_value_with;
use oncodp_core::{preset, solve_with, Execution, State};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    for name in ["base", "table5-four-actions"] {
        let scenario = preset(name).unwrap();
        for (label, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(label, name), &scenario, |b, sc| {
                b.iter(|| solve_with(black_box(sc), mode).unwrap())
            });
        }
    }

    // A larger grid where the per-period fan-out has room to pay off.
    let mut big = preset("base").unwrap();
    big.m = 200;
    big.n = 200;
    big.horizon = 12;
    for (label, mode) in MODES {
        group.bench_with_input(BenchmarkId::new(label, "m=n=200,T=12"), &big, |b, sc| {
            b.iter(|| solve_with(black_box(sc), mode).unwrap())
        });
    }
    group.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let scenario = preset("base").unwrap();
    let solution = solve_with(&scenario, Execution::Sequential).unwrap();
    let start = State::new(0, 5, 5);
    let mut group = c.benchmark_group("monte_carlo_10k");
    group.sample_size(20);
    for (label, mode) in MODES {
        group.bench_function(label, |b| {
            b.iter(|| monte_carlo_value_with(&scenario, &solution, black_box(start), 10_000, 42, mode).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_solve, bench_monte_carlo);
criterion_main!(benches);
