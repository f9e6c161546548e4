use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polymeasure::builtin::list_f;
use polymeasure::measuring::{enumerate_measurings, Strategy};
use polymeasure::stock::{list_alg, list_coalg, std_alg, std_coalg};
use polymeasure::PositionMonoid;

fn strategies(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_maybe");
    let (co, a, b) = (std_coalg(1), std_alg(2), std_alg(2));
    for s in Strategy::all() {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{s:?}")), &s, |bch, &s| {
            bch.iter(|| enumerate_measurings(black_box(&co), &a, &b, s).unwrap().len())
        });
    }
    g.finish();

    let mut g = c.benchmark_group("enumerate_propagate_maybe");
    for n in [2, 4, 6] {
        let (co, a, b) = (std_coalg(n), std_alg(n), std_alg(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bch, _| {
            bch.iter(|| enumerate_measurings(black_box(&co), &a, &b, Strategy::Propagate).unwrap().len())
        });
    }
    g.finish();

    let f = list_f(&PositionMonoid::cyclic(2));
    let (co, a) = (list_coalg(&f, 2).unwrap(), list_alg(&f, 2).unwrap());
    c.bench_function("enumerate_propagate_list_z2_2", |bch| {
        bch.iter(|| enumerate_measurings(black_box(&co), &a, &a, Strategy::Propagate).unwrap().len())
    });
}

criterion_group!(benches, strategies);
criterion_main!(benches);
