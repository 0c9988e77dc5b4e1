use criterion::{black_box, criterion_group, criterion_main, Criterion};
use onestreet::equilibrium::{nash_conv, solve};
use onestreet::metrics::{emd_1d, input_distance, output_distance};
use onestreet::{GameConfig, JointDeal};
use onestreet_bench::deals;

fn solver(c: &mut Criterion) {
    let cfg = GameConfig::default();
    let random = deals(8, 1);
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    g.bench_function("uniform eps 1e-4", |b| {
        b.iter(|| solve(black_box(&JointDeal::uniform(10)), &cfg, 1e-4, 100_000).unwrap())
    });
    g.bench_function("8 random deals eps 1e-4", |b| {
        b.iter(|| {
            for d in &random {
                black_box(solve(d, &cfg, 1e-4, 100_000).unwrap());
            }
        })
    });
    g.finish();

    let r = solve(&random[0], &cfg, 1e-4, 100_000).unwrap();
    c.bench_function("nash_conv", |b| b.iter(|| nash_conv(black_box(&random[0]), &r.s1, &r.s2, &cfg).unwrap()));
}

fn distances(c: &mut Criterion) {
    let d = deals(2, 2);
    let p: Vec<f64> = (0..31).map(|i| (i + 1) as f64 / 496.0).collect();
    let q: Vec<f64> = p.iter().rev().cloned().collect();
    c.bench_function("emd_1d 31", |b| b.iter(|| emd_1d(black_box(&p), black_box(&q)).unwrap()));

    let f = |j: &JointDeal| onestreet::deal::marginals(j).cdf_input();
    let (x, y) = (f(&d[0]), f(&d[1]));
    c.bench_function("input_distance", |b| b.iter(|| input_distance(black_box(&x), black_box(&y), 10).unwrap()));

    let s: Vec<f64> = (0..10).flat_map(|_| p.clone()).collect();
    let t: Vec<f64> = (0..10).flat_map(|_| q.clone()).collect();
    c.bench_function("output_distance", |b| b.iter(|| output_distance(black_box(&s), black_box(&t), 31).unwrap()));
}

criterion_group!(benches, solver, distances);
criterion_main!(benches);
