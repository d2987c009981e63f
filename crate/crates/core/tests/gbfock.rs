use dressed_core::gbfock::{
    build_space, displaced_vacuum, displaced_vacuum_series, eigen_residual, evolve_forced,
    truncated_eta_norm, FockVector,
};
use dressed_core::linalg::{euclidean_norm, CMatrix};
use dressed_core::{Complex64, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn space_matrices() {
    let s = build_space(4, 1.0).unwrap();
    let eta = CMatrix::diagonal(&s.eta);
    assert_eq!(&eta * &eta, CMatrix::identity(4));
    let comm = s.commutator();
    for i in 0..3 {
        assert!((comm[(i, i)] + c(1.0, 0.0)).norm() < 1e-15);
    }
    // Truncation artifact lives only in the last diagonal entry.
    assert!((comm[(3, 3)] - c(3.0, 0.0)).norm() < 1e-14);
    let h0 = build_space(10, 2.5).unwrap().h0;
    for n in 0..10 {
        assert!((h0[(n, n)] - c(2.5 * n as f64, 0.0)).norm() < 1e-13);
    }
}

#[test]
fn displaced_vacuum_is_an_eigenvector_with_flipped_sign() {
    let s = build_space(64, 1.0).unwrap();
    let q = c(0.5, 0.0);
    let v = displaced_vacuum(&s, q).unwrap();
    assert!(eigen_residual(&s, &v, q) < 1e-10);
    // An ordinary coherent state would have eigenvalue +Q.
    assert!(eigen_residual(&s, &v, -q) > 0.5);
    for n in 1..8 {
        let ratio = v.coeffs[n] / v.coeffs[0];
        let mut expected = c(1.0, 0.0);
        for k in 1..=n {
            expected *= q / (k as f64).sqrt();
        }
        assert!((ratio - expected).norm() < 1e-12 * expected.norm().max(1e-300));
    }
    assert!((v.coeffs[0].re - (0.125f64).exp()).abs() < 1e-13);
}

#[test]
fn matrix_exponential_matches_series() {
    let s = build_space(64, 1.0).unwrap();
    for q in [c(0.3, -0.4), c(-1.0, 0.0), c(0.0, 2.0), c(2.5, 2.5)] {
        let a = displaced_vacuum(&s, q).unwrap();
        let b = displaced_vacuum_series(&s, q).unwrap();
        assert!(a.aux_distance(&b) < 1e-10 * b.aux_norm(), "{q}");
        // The alternating η-sum cancels terms of size ‖v‖².
        let roundoff = 64.0 * f64::EPSILON * b.aux_norm().powi(2);
        assert!((a.eta_norm() - 1.0).abs() < 1e-9f64.max(roundoff), "{q} {}", a.eta_norm());
        assert!(a.tail_mass() < 1e-12 * b.aux_norm().powi(2));
    }
    assert!(matches!(
        displaced_vacuum(&s, c(4.0, 0.1)),
        Err(Error::Validity(_))
    ));
}

#[test]
fn vanishing_force_leaves_vacuum() {
    let s = build_space(16, 1.0).unwrap();
    let r = evolve_forced(&s, |_| c(0.0, 0.0), 0.0, 2.0, 8).unwrap();
    assert_eq!(r.q, c(0.0, 0.0));
    assert_eq!(r.phase, 0.0);
    assert_eq!(r.closed, s.vacuum());
    assert_eq!(r.stepped, s.vacuum());
}

#[test]
fn constant_force_closed_form_and_phase() {
    let s = build_space(64, 1.0).unwrap();
    let amp = c(0.6, 0.2);
    let (t0, t) = (0.3, 1.3);
    let r = evolve_forced(&s, |_| amp, t0, t, 200).unwrap();
    let w = 1.0;
    let expected_q = -amp * (Complex64::from_polar(1.0, w * t) - Complex64::from_polar(1.0, w * t0)) / w;
    assert!((r.q - expected_q).norm() < 1e-13);
    let span = t - t0;
    let expected_phase = -amp.norm_sqr() * (span - (w * span).sin() / w) / w;
    assert!((r.phase - expected_phase).abs() < 1e-10);
    assert!((r.printed_phase - 0.5 * expected_phase).abs() < 1e-10);
    assert!(r.aux_difference < 1e-8, "{}", r.aux_difference);
    assert!((r.overlap - c(1.0, 0.0)).norm() < 1e-8, "{}", r.overlap);

    // The state with half the phase is a different ray.
    let half = FockVector {
        coeffs: r
            .closed
            .coeffs
            .iter()
            .map(|x| x * Complex64::from_polar(1.0, r.printed_phase - r.phase))
            .collect(),
    };
    assert!((half.eta_inner(&r.stepped) - c(1.0, 0.0)).norm() > 1e-3);
}

#[test]
fn chirped_force_phase_oracle() {
    // α = 0.3 (1 + i t) e^{-iωt} gives Q = 0.3 (t²/2 - i t), phase = -0.015 t³.
    let s = build_space(64, 1.0).unwrap();
    let alpha = |t: f64| c(0.3, 0.3 * t) * Complex64::from_polar(1.0, -t);
    let r = evolve_forced(&s, alpha, 0.0, 1.5, 200).unwrap();
    assert!((r.q - c(0.3 * 1.125, -0.45)).norm() < 1e-13);
    assert!((r.phase + 0.015 * 1.5f64.powi(3)).abs() < 1e-10);
    assert!((r.overlap - c(1.0, 0.0)).norm() < 1e-8);
}

#[test]
fn oscillating_force_phase_oracle() {
    let s = build_space(64, 1.0).unwrap();
    let alpha = |t: f64| c(0.7 * (2.0 * t).cos(), 0.0);
    let (t0, t) = (-0.4, 1.6);
    let r = evolve_forced(&s, alpha, t0, t, 200).unwrap();

    let antiderivative = |s: f64| {
        (c(0.0, -1.0 / 3.0) * Complex64::from_polar(1.0, 3.0 * s)
            + c(0.0, 1.0) * Complex64::from_polar(1.0, -s))
            * 0.5
    };
    let q_of = |s: f64| c(0.0, -0.7) * (antiderivative(s) - antiderivative(t0));
    let q_dot = |s: f64| c(0.0, -1.0) * alpha(s) * Complex64::from_polar(1.0, s);
    let f = |s: f64| (q_dot(s).conj() * q_of(s)).im;
    let intervals = 4000;
    let h = (t - t0) / intervals as f64;
    let mut simpson = f(t0) + f(t);
    for i in 1..intervals {
        simpson += f(t0 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    simpson *= h / 3.0;

    assert!((r.q - q_of(t)).norm() < 1e-12);
    assert!((r.phase - simpson).abs() < 1e-10, "{} {}", r.phase, simpson);
    assert!((r.overlap - c(1.0, 0.0)).norm() < 1e-8);
    assert!(r.aux_difference < 1e-8);
}

#[test]
fn too_few_steps_is_reported() {
    let s = build_space(32, 1.0).unwrap();
    match evolve_forced(&s, |_| c(1.0, 0.0), 0.0, 2.0, 2) {
        Err(Error::StepCount { steps, residual, .. }) => {
            assert_eq!(steps, 2);
            assert!(residual > 1e-9);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn stepped_state_solves_interaction_picture_equation() {
    let s = build_space(64, 1.0).unwrap();
    let alpha = |t: f64| c(0.5 * (1.0 + t).sin(), 0.2);
    let (t0, t, h) = (0.0, 1.0, 1e-3);
    let state = |tt: f64| evolve_forced(&s, alpha, t0, tt, 400).unwrap().stepped.coeffs;
    let (minus, mid, plus) = (state(t - h), state(t), state(t + h));
    let rhs = s.interaction_apply(alpha(t), t, &mid);
    let residual: Vec<Complex64> = (0..s.dim)
        .map(|n| c(0.0, 1.0) * (plus[n] - minus[n]) / (2.0 * h) - rhs[n])
        .collect();
    let relative = euclidean_norm(&residual) / euclidean_norm(&mid);
    assert!(relative < 1e-6 / (t - t0), "{relative}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalue_law(re in -0.7..0.7f64, im in -0.7..0.7f64, extra in 0usize..40) {
        let q = c(re, im);
        prop_assume!(q.norm() <= 1.0);
        let s = build_space(64 + extra, 1.0).unwrap();
        let v = displaced_vacuum(&s, q).unwrap();
        prop_assert!(eigen_residual(&s, &v, q) < 1e-8);
    }

    #[test]
    fn indefinite_normalization(re in -1.5..1.5f64, im in -1.5..1.5f64) {
        let q = c(re, im);
        let s = build_space(64, 1.0).unwrap();
        let v = displaced_vacuum_series(&s, q).unwrap();
        prop_assert!((v.eta_norm() - 1.0).abs() < 1e-9);
        prop_assert!((truncated_eta_norm(64, q) - 1.0).abs() < 1e-9);
    }
}
