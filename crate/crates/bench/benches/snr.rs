use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use uaa_core::numerics::{adaptive_quadrature, definite_integral};
use uaa_core::{mrc_snr_closed_form, mrc_snr_direct, ArcArrayGeometry, ClosedFormInputs, LinkBudget, UserLocation};

fn snr(c: &mut Criterion) {
    let link = LinkBudget::from_reference_snr_db(50.0, 0.01).unwrap();
    let user = UserLocation::from_degrees(16.0, 30.0).unwrap();
    let mut group = c.benchmark_group("mrc_snr");
    for aperture in [8.0, 50.0, 200.0] {
        let geom = ArcArrayGeometry::from_aperture_support(aperture, 4.0, 0.01).unwrap();
        group.bench_with_input(BenchmarkId::new("direct", aperture), &geom, |b, g| {
            b.iter(|| mrc_snr_direct(black_box(g), black_box(&user), &link).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("closed_form", aperture), &geom, |b, g| {
            b.iter(|| mrc_snr_closed_form(black_box(g), black_box(&user), &link).unwrap())
        });
    }
    group.finish();
}

fn integral(c: &mut Criterion) {
    let link = LinkBudget::from_reference_snr_db(50.0, 0.01).unwrap();
    let user = UserLocation::from_degrees(16.0, 30.0).unwrap();
    let geom = ArcArrayGeometry::from_aperture_support(50.0, 4.0, 0.01).unwrap();
    let inputs = ClosedFormInputs::new(&geom, &user, &link).unwrap();
    let coeffs = inputs.coefficients().unwrap();
    let w = inputs.half_width();
    let mut group = c.benchmark_group("integral");
    group.bench_function("antiderivative", |b| {
        b.iter(|| definite_integral(black_box(&coeffs), -w, w).unwrap())
    });
    group.bench_function("adaptive_quadrature", |b| {
        b.iter(|| adaptive_quadrature(|x| coeffs.eval(x), -w, w, 1e-12).unwrap())
    });
    group.finish();
}

criterion_group!(benches, snr, integral);
criterion_main!(benches);
