use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eikonal_bench::{catalog_field, unit_grid, unit_minkowski};
use eikonal_core::distance::{distance_to_set, point_distance_dp, Direction, Target};
use eikonal_core::geodesics::shoot_between;
use eikonal_core::solutions::{lax_oleinik_apply, AnalyticKind};
use eikonal_core::{Event, Slab, Spacetime, TemporalFunction};

fn distance(c: &mut Criterion) {
    let st = Spacetime::minkowski2(Slab::new(-10.0, 10.0, -10.0, 10.0));
    let mut group = c.benchmark_group("distance");
    group.sample_size(10);
    for n in [32, 64, 128] {
        group.bench_with_input(BenchmarkId::new("point_dp", n), &n, |b, &n| {
            b.iter(|| point_distance_dp(&st, &Event::new(0.0, 0.0), black_box(&Event::new(2.0, 1.0)), n))
        });
        let g = unit_grid(n);
        let target = Target::Temporal { tau: TemporalFunction::ScaledTime { k: 1.0 }, s: 0.9 };
        group.bench_with_input(BenchmarkId::new("level_set", n), &n, |b, _| {
            b.iter(|| distance_to_set(&st, &g, black_box(&target), Direction::ToFuture).unwrap())
        });
    }
    group.finish();
}

fn lax_oleinik(c: &mut Criterion) {
    let st = unit_minkowski();
    let mut group = c.benchmark_group("lax_oleinik");
    group.sample_size(10);
    for n in [32, 64] {
        let u = catalog_field(&st, n, AnalyticKind::AbsTime);
        group.bench_with_input(BenchmarkId::new("abs_time", n), &n, |b, _| {
            b.iter(|| lax_oleinik_apply(&st, black_box(&u), 0.1).unwrap())
        });
    }
    group.finish();
}

fn shooting(c: &mut Criterion) {
    let ds = Spacetime::desitter_toy(Slab::new(-1.0, 3.0, -4.0, 4.0));
    let (p, q) = (Event::new(0.0, 0.0), Event::new(1.5, 0.4));
    c.bench_function("shoot_between/desitter", |b| b.iter(|| shoot_between(&ds, &p, black_box(&q), 1e-10).unwrap()));
}

criterion_group!(benches, distance, lax_oleinik, shooting);
criterion_main!(benches);
