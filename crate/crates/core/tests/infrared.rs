use std::f64::consts::PI;

use dressed_core::infrared::{
    angular_spectrum, delta_functional, delta_shift, knee_fit, loglog_slope, photon_spectrum,
    total_photon_number, CollisionSpec, DeltaGrid, SphereGrid,
};
use dressed_core::spinor::polarization_basis;
use dressed_core::{ThreeVector, FINE_STRUCTURE};
use proptest::prelude::*;

fn collision(v: f64) -> CollisionSpec {
    CollisionSpec::new(
        ThreeVector::new(v, 0.0, 0.0),
        ThreeVector::new(0.92 * v, 0.06 * v, -0.03 * v),
        1.0,
        FINE_STRUCTURE,
    )
    .unwrap()
}

#[test]
fn shift_scales_with_velocity_squared() {
    let speeds = [0.02, 0.04, 0.06, 0.08, 0.1];
    let points: Vec<(f64, f64)> = speeds
        .iter()
        .map(|&v| (v, delta_shift(&collision(v)).unwrap().delta))
        .collect();
    let slope = loglog_slope(&points);
    assert!((slope - 2.0).abs() < 0.05, "{slope}");
    for &v in &speeds {
        let d = delta_shift(&collision(v)).unwrap();
        assert!(d.coefficient > 2.0 / 3.0 && d.coefficient < 8.0 / 3.0, "{}", d.coefficient);
    }
}

#[test]
fn shift_approaches_nonrelativistic_value() {
    // Small-v limit of the functional with Δ → 0 is (4/3) e² p0² exactly.
    let d = delta_shift(&collision(0.01)).unwrap();
    assert!((d.coefficient - 4.0 / 3.0).abs() < 0.01 * 4.0 / 3.0, "{}", d.coefficient);
    assert!((d.first_iterate - d.delta).abs() < 1e-3 * d.delta);
}

#[test]
fn shift_scales_with_mass() {
    let mut heavy = collision(0.05);
    heavy.mass = 3.0;
    let a = delta_shift(&collision(0.05)).unwrap().delta;
    let b = delta_shift(&heavy).unwrap().delta;
    assert!((b / a - 3.0).abs() < 1e-9);
}

#[test]
fn shift_needs_no_ultraviolet_cutoff() {
    let spec = collision(0.1);
    let delta = delta_shift(&spec).unwrap().delta;
    let at = |q_max: Option<f64>| {
        let grid = DeltaGrid {
            q_max,
            ..DeltaGrid::default()
        };
        delta_functional(&spec, delta, &grid).unwrap()
    };
    let (one, two, all) = (at(Some(1e9)), at(Some(2e9)), at(None));
    assert!(((two - one) / two).abs() < 1e-8);
    assert!(((all - two) / all).abs() < 1e-8);
}

#[test]
fn soft_limit_matches_taylor_expansion() {
    let spec = collision(0.1);
    let delta = delta_shift(&spec).unwrap().delta;
    let omega = 1e-6 * delta;
    for dir in [ThreeVector::new(0.2, 0.5, 0.84), ThreeVector::new(-1.0, 0.1, 0.0)] {
        let (n1, n2) = photon_spectrum(&spec, omega, dir, delta).unwrap();
        let basis = polarization_basis(dir * omega).unwrap();
        let dv = spec.v2 - spec.v1;
        for (alpha, n) in [(1, n1), (2, n2)] {
            let e = basis.vectors[alpha].spatial();
            let limit = 2.0 * PI * spec.alpha / omega * e.dot(dv).powi(2) / (delta * delta);
            assert!((n - limit).abs() < 1e-3 * limit, "{n} vs {limit}");
        }
    }
}

#[test]
fn classical_spectrum_falls_as_inverse_cube() {
    let spec = collision(0.1);
    let grid = SphereGrid::default();
    let points: Vec<(f64, f64)> = (0..=8)
        .map(|i| {
            let w = 1e-4 * 100f64.powf(i as f64 / 8.0);
            (w, angular_spectrum(&spec, w, 0.0, &grid).unwrap())
        })
        .collect();
    let slope = loglog_slope(&points);
    assert!((slope + 3.0).abs() < 0.03, "{slope}");
}

#[test]
fn photon_number_is_infrared_finite_with_shift() {
    let spec = collision(0.1);
    let delta = delta_shift(&spec).unwrap().delta;
    let grid = SphereGrid::new(32, 32).unwrap();
    let n: Vec<f64> = [1e-2, 1e-4, 1e-6]
        .iter()
        .map(|f| total_photon_number(&spec, delta, f * delta, 1.0, &grid).unwrap())
        .collect();
    let (d1, d2) = (n[1] - n[0], n[2] - n[1]);
    assert!(d1 > 0.0 && d2 > 0.0);
    assert!(d2 < 0.01 * d1, "{d1:e} {d2:e}");

    // Classical: N grows like ln(1/ω_min).
    let mins: [f64; 3] = [1e-8, 1e-6, 1e-4];
    let classical: Vec<(f64, f64)> = mins
        .iter()
        .map(|&w| ((1.0 / w).ln(), total_photon_number(&spec, 0.0, w, 1.0, &grid).unwrap()))
        .collect();
    let slope = (classical[2].1 - classical[0].1) / (classical[2].0 - classical[0].0);
    let intercept = classical[0].1 - slope * classical[0].0;
    for &(x, y) in &classical {
        assert!((intercept + slope * x - y).abs() < 0.02 * y);
    }
    assert!(slope > 0.0);
}

#[test]
fn knee_sits_near_the_shift() {
    let spec = collision(0.1);
    let delta = delta_shift(&spec).unwrap().delta;
    let fit = knee_fit(&spec, delta, &SphereGrid::new(32, 32).unwrap()).unwrap();
    assert!((fit.low_exponent - 2.0).abs() < 0.05, "{fit:?}");
    assert!(fit.high_exponent.abs() < 0.05, "{fit:?}");
    assert!(fit.knee_over_delta > 1.0 / 3.0 && fit.knee_over_delta < 3.0, "{fit:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_positive_and_symmetric(
        v in 0.01..0.4f64,
        kx in -0.15..0.15f64, ky in -0.15..0.15f64,
        log_w in -8.0..0.0f64,
        dx in -1.0..1.0f64, dy in -1.0..1.0f64, dz in -1.0..1.0f64,
        log_delta in -9.0..-2.0f64,
    ) {
        let dir = ThreeVector::new(dx, dy, dz);
        prop_assume!(dir.norm() > 0.05);
        let v1 = ThreeVector::new(v, 0.0, 0.0);
        let v2 = v1 + ThreeVector::new(kx, ky, 0.0) * v;
        let spec = CollisionSpec::new(v1, v2, 1.0, FINE_STRUCTURE).unwrap();
        let (w, delta) = (10f64.powf(log_w), 10f64.powf(log_delta));
        let (n1, n2) = photon_spectrum(&spec, w, dir, delta).unwrap();
        prop_assert!(n1 >= 0.0 && n2 >= 0.0 && n1.is_finite() && n2.is_finite());
        let (m1, m2) = photon_spectrum(&spec.swapped(), w, dir, delta).unwrap();
        prop_assert!((n1 - m1).abs() <= 1e-12 * n1.max(1e-300));
        prop_assert!((n2 - m2).abs() <= 1e-12 * n2.max(1e-300));
    }
}

#[test]
fn photon_number_grows_with_upper_limit() {
    let spec = collision(0.1);
    let grid = SphereGrid::new(24, 24).unwrap();
    let mut previous = 0.0;
    for w_max in [1e-6, 1e-4, 1e-2, 1.0] {
        let n = total_photon_number(&spec, 1e-5, 1e-9, w_max, &grid).unwrap();
        assert!(n > previous);
        previous = n;
    }
    let still = CollisionSpec::new(spec.v1, spec.v1, 1.0, FINE_STRUCTURE).unwrap();
    assert_eq!(total_photon_number(&still, 1e-5, 1e-6, 1.0, &grid).unwrap(), 0.0);
}
