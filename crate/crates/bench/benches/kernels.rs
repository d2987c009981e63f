use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use dressed_core::coherent::{cloud_summary, CloudGrid, WavePacket};
use dressed_core::gbfock::{build_space, evolve_forced};
use dressed_core::infrared::{angular_spectrum, CollisionSpec, SphereGrid};
use dressed_core::meanfield::{potential_rest, potential_retarded, Trajectory};
use dressed_core::specfun::{bessel_k0, k0_cumulative};
use dressed_core::{Complex64, Electron, Spin, ThreeVector};

fn special_functions(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=64).map(|i| 0.05 * i as f64).collect();
    c.bench_function("bessel_k0 x64", |b| {
        b.iter(|| xs.iter().map(|&x| bessel_k0(black_box(x)).unwrap()).sum::<f64>())
    });
    c.bench_function("k0_cumulative x64", |b| {
        b.iter(|| xs.iter().map(|&x| k0_cumulative(black_box(x)).unwrap()).sum::<f64>())
    });
}

fn mean_fields(c: &mut Criterion) {
    let e = Electron::default();
    c.bench_function("potential_rest", |b| b.iter(|| potential_rest(black_box(0.7), &e).unwrap()));
    let traj = Trajectory::uniform(ThreeVector::ZERO, ThreeVector::new(0.1, 0.0, 0.0)).unwrap();
    let p = ThreeVector::new(0.0, 2.0, 0.0);
    c.bench_function("potential_retarded", |b| {
        b.iter(|| potential_retarded(black_box(p), 0.0, &traj, &e).unwrap())
    });
}

fn photon_cloud(c: &mut Criterion) {
    let packet = WavePacket::new(20.0, ThreeVector::ZERO, Spin::Up).unwrap();
    let grid = CloudGrid {
        n_theta: 8,
        n_phi: 8,
        ..CloudGrid::default()
    };
    let e = Electron::default();
    let mut group = c.benchmark_group("cloud");
    group.sample_size(10);
    group.bench_function("cloud_summary 8x8", |b| {
        b.iter(|| cloud_summary(&packet, black_box(1.0), ThreeVector::ZERO, e.charge, &grid).unwrap())
    });
    group.finish();
}

fn infrared(c: &mut Criterion) {
    let e = Electron::default();
    let spec = CollisionSpec::new(
        ThreeVector::new(0.05, 0.0, 0.0),
        ThreeVector::new(0.045, 0.002, 0.0),
        e.mass,
        e.alpha(),
    )
    .unwrap();
    let grid = SphereGrid::new(16, 16).unwrap();
    c.bench_function("angular_spectrum 16x16", |b| {
        b.iter(|| angular_spectrum(&spec, black_box(1e-3), 1e-4, &grid).unwrap())
    });
}

fn forced_oscillator(c: &mut Criterion) {
    let space = build_space(32, 1.0).unwrap();
    let mut group = c.benchmark_group("gbfock");
    group.sample_size(10);
    group.bench_function("evolve_forced n=32", |b| {
        b.iter(|| evolve_forced(&space, |_| Complex64::new(0.1, 0.0), 0.0, black_box(2.0), 200).unwrap())
    });
    group.finish();
}

criterion_group!(benches, special_functions, mean_fields, photon_cloud, infrared, forced_oscillator);
criterion_main!(benches);
