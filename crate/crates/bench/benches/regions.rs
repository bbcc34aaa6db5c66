use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use uaa_core::regions::{ddrayl_approx, ddrayl_exact, upd_numeric, PowerRatioMode};
use uaa_core::ArcArrayGeometry;

fn regions(c: &mut Criterion) {
    let geom = ArcArrayGeometry::from_aperture_support(0.635, 0.3, 0.01).unwrap();
    let theta = 30f64.to_radians();
    let mut group = c.benchmark_group("regions");
    group.bench_function("ddrayl_exact", |b| {
        b.iter(|| ddrayl_exact(black_box(&geom), black_box(theta), None).unwrap())
    });
    group.bench_function("ddrayl_approx", |b| {
        b.iter(|| ddrayl_approx(black_box(&geom), black_box(theta)).unwrap())
    });
    group.bench_function("upd_numeric", |b| {
        b.iter(|| upd_numeric(black_box(&geom), black_box(theta), 0.9, PowerRatioMode::ChordEnd, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, regions);
criterion_main!(benches);
