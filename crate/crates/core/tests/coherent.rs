use std::f64::consts::PI;

use dressed_core::coherent::{
    amplitude_closed_form, amplitude_interval, amplitude_numeric, cloud_summary,
    cloud_summary_rotated, f_gaussian, f_stationary, solve_self_consistent, CloudGrid,
    PhotonMode, PolarizationSum, StationaryCurrent, WavePacket,
};
use dressed_core::specfun::{gauss_legendre, integrate, QuadratureSpec};
use dressed_core::spinor::{energy, polarization_basis, FourVector};
use dressed_core::{Complex64, Spin, ThreeVector, FINE_STRUCTURE};
use proptest::prelude::*;

fn charge() -> f64 {
    FINE_STRUCTURE.sqrt()
}

#[test]
fn gaussian_average_agrees_with_stationary_phase() {
    let e = charge();
    let packet = WavePacket::new(50.0, ThreeVector::new(0.05, 0.02, -0.03), Spin::Up).unwrap();
    let qs = [
        ThreeVector::new(0.0, 0.0, 1.0),
        ThreeVector::new(0.3, -0.4, 0.1),
        ThreeVector::new(-0.6, 0.5, 0.6),
        ThreeVector::new(0.01, 0.0, 0.0),
    ];
    for q in qs {
        for t in [0.0, 1.0] {
            let g = f_gaussian(q, t, &packet, ThreeVector::ZERO, e).unwrap().value;
            let s = f_stationary(q, t, &packet, ThreeVector::ZERO, e);
            let scale = (0..4).map(|mu| s.component(mu).norm()).fold(0.0, f64::max);
            for mu in 0..4 {
                let d = (g.component(mu) - s.component(mu)).norm();
                assert!(d <= 1e-3 * scale, "q={q:?} t={t} mu={mu}: {d:e}");
            }
        }
    }
}

#[test]
fn gaussian_density_against_product_legendre() {
    // Independent oracle: 40-point Gauss-Legendre per axis over ±8σ.
    let e = charge();
    let width = 5.0;
    let packet = WavePacket::new(width, ThreeVector::ZERO, Spin::Up).unwrap();
    let q = ThreeVector::Z;
    let f = f_gaussian(q, 0.0, &packet, ThreeVector::ZERO, e).unwrap().value;
    assert!(f.t.im.abs() < 1e-15);

    let sigma = 1.0 / (2.0 * width);
    let rule = gauss_legendre(40);
    let nodes: Vec<(f64, f64)> = rule.mapped(-8.0 * sigma, 8.0 * sigma).collect();
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, wx) in &nodes {
        for &(y, wy) in &nodes {
            for &(z, wz) in &nodes {
                let p = ThreeVector::new(x, y, z);
                let w = wx * wy * wz * (-2.0 * width * width * p.norm_sqr()).exp();
                let cur = StationaryCurrent::new(
                    q,
                    &WavePacket::new(width, p, Spin::Up).unwrap(),
                    ThreeVector::ZERO,
                    1.0,
                );
                num += w * cur.f0.t.re;
                den += w;
            }
        }
    }
    let oracle = e * num / den;
    assert!((f.t.re - oracle).abs() < 1e-10 * e, "{} vs {oracle}", f.t.re);
    let center = e / energy(q * 0.5);
    assert!(f.t.re > center && f.t.re < e);
}

#[test]
fn rest_scalar_amplitude_closed_form_and_quadrature() {
    let e = charge();
    let packet = WavePacket::at_rest(50.0).unwrap();
    let q = ThreeVector::new(0.4, -0.2, 0.9);
    let mode = PhotonMode::new(0, q).unwrap();
    let basis = polarization_basis(q).unwrap();
    let cur = StationaryCurrent::new(q, &packet, ThreeVector::ZERO, e);
    let spec = QuadratureSpec::default().with_tolerances(1e-16, 1e-11);
    let omega = mode.omega();
    let g2 = mode.coupling().powi(2);
    let a2 = cur.f0.t.norm_sqr();
    for t in [0.13, 0.71, 1.9, 2.4, 3.3, 4.05, 5.6, 7.2, 8.8, 11.4] {
        let closed = amplitude_closed_form(mode, &basis, t, &cur);
        let expected = g2 * a2 * 2.0 * (1.0 - (omega * t).cos()) / (omega * omega);
        assert!((closed.amplitude.norm_sqr() - expected).abs() < 1e-13 * expected.max(1e-300));
        let numeric = amplitude_numeric(mode, &basis, t, |s| cur.at(s), &spec).expect("numeric");
        assert!((numeric.amplitude - closed.amplitude).norm() < 1e-10 * closed.amplitude.norm());
        assert!((numeric.chi - closed.chi).abs() < 1e-10 * closed.chi.abs().max(1e-12));
    }
}

#[test]
fn chi_is_real_for_arbitrary_current() {
    let q = ThreeVector::new(0.2, 0.5, -0.3);
    let basis = polarization_basis(q).unwrap();
    let f = |s: f64| {
        FourVector::new(
            Complex64::new((1.3 * s).cos(), 0.2 * s),
            [
                Complex64::new(0.1, -0.3 * s.sin()),
                Complex64::new(s * s * 0.05, 0.0),
                Complex64::from_polar(0.4, 2.0 * s),
            ],
        )
    };
    let spec = QuadratureSpec::default();
    for alpha in 0..4 {
        let mode = PhotonMode::new(alpha, q).unwrap();
        let a = amplitude_numeric(mode, &basis, 2.5, f, &spec).unwrap();
        assert!(a.chi.is_finite());
        // The symmetric complex form of the phase integrand has no imaginary
        // part at any instant.
        let g = mode.coupling();
        let e = basis.vectors[alpha];
        let q_dot = |s: f64| {
            Complex64::new(0.0, -g)
                * dressed_core::spinor::contract(&e, &f(s))
                * Complex64::from_polar(1.0, mode.omega() * s)
        };
        let mut residual: f64 = 0.0;
        for k in 1..25 {
            let s = 2.5 * k as f64 / 25.0;
            let qs = integrate(q_dot, 0.0, s, &spec).unwrap().value;
            let d = q_dot(s);
            let integrand = Complex64::new(0.0, -0.5) * (d.conj() * qs - qs.conj() * d);
            residual = residual.max(integrand.im.abs());
        }
        assert!(residual < 1e-12, "alpha={alpha}: {residual:e}");
    }
}

#[test]
fn amplitudes_are_additive_over_intervals() {
    let e = charge();
    let packet = WavePacket::new(20.0, ThreeVector::new(0.08, 0.0, 0.03), Spin::Down).unwrap();
    let q = ThreeVector::new(0.5, 0.5, -0.1);
    let basis = polarization_basis(q).unwrap();
    let cur = StationaryCurrent::new(q, &packet, ThreeVector::ZERO, e);
    for alpha in 0..4 {
        let mode = PhotonMode::new(alpha, q).unwrap();
        let full = amplitude_closed_form(mode, &basis, 3.0, &cur).amplitude;
        let first = amplitude_closed_form(mode, &basis, 1.2, &cur).amplitude;
        let second = amplitude_interval(mode, &basis, 1.2, 3.0, &cur);
        assert!((full - first - second).norm() < 1e-15);
    }
}

#[test]
fn zero_coupling_gives_empty_cloud() {
    let packet = WavePacket::new(20.0, ThreeVector::new(0.05, 0.0, 0.0), Spin::Up).unwrap();
    let grid = CloudGrid {
        n_theta: 8,
        n_phi: 8,
        ..CloudGrid::default()
    };
    let s = cloud_summary(&packet, 2.0, ThreeVector::ZERO, 0.0, &grid).unwrap();
    assert_eq!(s.n_photons, 0.0);
    assert_eq!(s.delta_e, 0.0);
    assert_eq!(s.delta_k, ThreeVector::ZERO);
}

#[test]
fn zero_time_cloud_is_empty() {
    let packet = WavePacket::new(20.0, ThreeVector::new(0.05, 0.0, 0.0), Spin::Up).unwrap();
    let s = cloud_summary(&packet, 0.0, ThreeVector::ZERO, charge(), &CloudGrid::default()).unwrap();
    for alpha in 0..4 {
        assert_eq!(s.per_alpha[alpha].n_photons, 0.0);
        assert_eq!(s.per_alpha[alpha].delta_e, 0.0);
    }
    assert_eq!(s.delta_k, ThreeVector::ZERO);
}

#[test]
fn rest_cloud_scalar_energy_and_symmetry() {
    let e = charge();
    let packet = WavePacket::at_rest(50.0).unwrap();
    let grid = CloudGrid::default();
    let s = cloud_summary(&packet, 5.0, ThreeVector::ZERO, e, &grid).unwrap();
    let scale = s.delta_e.abs();
    assert!(s.delta_k.norm() <= 1e-10 * scale, "{:?}", s.delta_k);
    for alpha in 0..4 {
        assert!(s.per_alpha[alpha].delta_k.norm() <= 1e-10 * scale.max(1e-30));
    }
    // Long-time scalar energy: (2e²/π)∫dq/(1+q²/4) over [0, q_max].
    let expected = 2.0 * e * e * (2.0 / PI) * (0.5 * grid.q_max).atan();
    let got = s.per_alpha[0].e_cloud_average;
    assert!((got - expected).abs() < 1e-8 * expected, "{got} vs {expected}");
    assert!(s.per_alpha[3].e_cloud_average.abs() < 1e-12 * expected);
    // The transverse energy grows linearly with the cutoff.
    assert!(!s.uv_converged[1]);
    let all = s.totals(PolarizationSum::AllPositive);
    let metric = s.totals(PolarizationSum::MetricWeighted);
    assert!((all.e_cloud_average - metric.e_cloud_average - 2.0 * got).abs() < 1e-12);
}

#[test]
fn cloud_observables_do_not_depend_on_transverse_orientation() {
    let e = charge();
    let packet = WavePacket::new(30.0, ThreeVector::new(0.06, -0.02, 0.04), Spin::Up).unwrap();
    let grid = CloudGrid {
        n_theta: 12,
        n_phi: 16,
        q_max: 5.0,
        ..CloudGrid::default()
    };
    let a = cloud_summary(&packet, 3.0, ThreeVector::ZERO, e, &grid).unwrap();
    let b = cloud_summary_rotated(&packet, 3.0, ThreeVector::ZERO, e, &grid, 0.731).unwrap();
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs());
    assert!(rel(a.n_photons, b.n_photons) < 1e-10);
    assert!(rel(a.delta_e, b.delta_e) < 1e-10);
    assert!((a.delta_k - b.delta_k).norm() < 1e-10 * a.delta_k.norm());
}

#[test]
fn self_consistency_at_rest_is_immediate() {
    let packet = WavePacket::at_rest(50.0).unwrap();
    let grid = CloudGrid {
        n_theta: 8,
        n_phi: 8,
        ..CloudGrid::default()
    };
    let traj = solve_self_consistent(&packet, &[1.0, 2.0], charge(), &grid).unwrap();
    for p in traj {
        assert_eq!(p.iterations, 1);
        assert!(p.delta_k.norm() < 1e-12);
    }
}

#[test]
fn self_consistent_momentum_loss_follows_k0() {
    // With the spin along z the only preferred directions are k0 and the
    // spin axis; for k0 along or across that axis Δk must be parallel to k0.
    let grid = CloudGrid {
        n_theta: 16,
        n_phi: 16,
        q_max: 5.0,
        ..CloudGrid::default()
    };
    for k0 in [ThreeVector::new(0.0, 0.0, 0.01), ThreeVector::new(0.006, 0.008, 0.0)] {
        let packet = WavePacket::new(50.0, k0, Spin::Up).unwrap();
        let traj = solve_self_consistent(&packet, &[2.0], charge(), &grid).unwrap();
        let p = &traj[0];
        let dir = k0.unit().unwrap();
        let perp = p.delta_k - dir * p.delta_k.dot(dir);
        assert!(p.delta_k.norm() > 0.0);
        assert!(perp.norm() < 1e-8 * p.delta_k.norm(), "{:?}", p.delta_k);
        assert!(p.contraction.iter().all(|&r| r < 1.0), "{:?}", p.contraction);
    }
}

fn small_vector(range: f64) -> impl Strategy<Value = ThreeVector> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| ThreeVector::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stationary_current_is_conserved(
        k0 in small_vector(0.2), dk in small_vector(0.05), q in small_vector(2.0),
        t in 0.0..20.0f64, up in any::<bool>(),
    ) {
        prop_assume!(q.norm() > 1e-6);
        let spin = if up { Spin::Up } else { Spin::Down };
        let packet = WavePacket::new(20.0, k0, spin).unwrap();
        let cur = StationaryCurrent::new(q, &packet, dk, charge());
        prop_assert!(cur.continuity_residual() < 1e-10);
        let f = cur.at(t);
        let residual = (f.t * cur.nu - f.spatial_dot(q)).norm();
        prop_assert!(residual < 1e-10, "{residual:e}");
    }

    #[test]
    fn amplitude_composes_over_adjacent_intervals(
        k0 in small_vector(0.2), q in small_vector(2.0), t1 in 0.0..10.0f64, dt in 0.0..10.0f64,
        alpha in 0usize..4,
    ) {
        prop_assume!(q.norm() > 1e-3);
        let packet = WavePacket::new(20.0, k0, Spin::Up).unwrap();
        let basis = polarization_basis(q).unwrap();
        let cur = StationaryCurrent::new(q, &packet, ThreeVector::ZERO, charge());
        let mode = PhotonMode::new(alpha, q).unwrap();
        let full = amplitude_closed_form(mode, &basis, t1 + dt, &cur).amplitude;
        let first = amplitude_closed_form(mode, &basis, t1, &cur).amplitude;
        let second = amplitude_interval(mode, &basis, t1, t1 + dt, &cur);
        prop_assert!((full - first - second).norm() < 1e-12 * (1.0 + full.norm()));
    }

    #[test]
    fn phase_integrand_is_real(
        k0 in small_vector(0.2), q in small_vector(2.0), t in 0.1..10.0f64, alpha in 0usize..4,
    ) {
        prop_assume!(q.norm() > 1e-3);
        let packet = WavePacket::new(20.0, k0, Spin::Down).unwrap();
        let basis = polarization_basis(q).unwrap();
        let cur = StationaryCurrent::new(q, &packet, ThreeVector::ZERO, charge());
        let mode = PhotonMode::new(alpha, q).unwrap();
        let closed = amplitude_closed_form(mode, &basis, t, &cur);
        let g = mode.coupling();
        let e = basis.vectors[alpha];
        let d = Complex64::new(0.0, -g)
            * dressed_core::spinor::contract(&e, &cur.at(t))
            * Complex64::from_polar(1.0, mode.omega() * t);
        let integrand = Complex64::new(0.0, -0.5) * (d.conj() * closed.amplitude - closed.amplitude.conj() * d);
        prop_assert!(integrand.im.abs() < 1e-12 * (1.0 + integrand.re.abs()));
        prop_assert!(closed.chi.is_finite());
    }
}
