use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use d2dsim_bench::feasible_group;
use d2dsim_core::{first_pair_powers, max_power_walk, min_power_solve};

fn bench_closed_form(c: &mut Criterion) {
    let (scn, _, _) = feasible_group(1);
    c.bench_function("first_pair_powers", |b| {
        b.iter(|| first_pair_powers(black_box(&scn), 0, 0))
    });
}

fn bench_min_power_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("min_power_solve");
    for k in [1usize, 2, 4, 8] {
        let (scn, group, _) = feasible_group(k);
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| min_power_solve(black_box(&group), black_box(&scn)))
        });
    }
    g.finish();
}

fn bench_walk(c: &mut Criterion) {
    let mut g = c.benchmark_group("max_power_walk");
    for k in [1usize, 2, 4] {
        let (scn, group, solved) = feasible_group(k);
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| {
            b.iter(|| max_power_walk(black_box(&group), black_box(&scn), black_box(&solved)))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_closed_form, bench_min_power_solve, bench_walk);
criterion_main!(benches);
