mod common;

use std::f64::consts::PI;

use common::projected;
use hydrostat::analysis::exponents::{conjugate, slack_p, slack_q};
use hydrostat::analysis::{
    damping_threshold_check, estimate_c_sigma, estimate_c_star, exponent_feasible, product_estimate_ratio,
    nonlinear_estimate_ratio, twisted_cancellation_probe,
};
use hydrostat::field::{Parity, SpectralScalar};
use hydrostat::initial::random_decay_field;
use hydrostat::spectral::nonlinear_q;
use hydrostat::{Error, FourierField, SpectralVelocity, WaveIndex};
use num_complex::Complex64;
use proptest::prelude::*;

/// Feasibility of `sigma s = hundredths / 100` by scanning `p = i / 10^4`.
/// In integers: `p (1 + x) > 2` and `p (3 - x) < 3` with `x = sigma s - 1`.
fn brute_force_feasible(hundredths: i64) -> bool {
    let x = hundredths - 100;
    (10_001..20_000i64).any(|i| i * (100 + x) > 2_000_000 && i * (300 - x) < 3_000_000)
}

#[test]
fn feasibility_matches_brute_force_on_a_fine_grid() {
    for h in 101..200i64 {
        let sigma_s = h as f64 / 100.0;
        let got = exponent_feasible(sigma_s, 1.0).unwrap().is_some();
        assert_eq!(got, brute_force_feasible(h), "sigma s = {sigma_s}");
        // Same product split differently.
        assert_eq!(
            exponent_feasible(1.99, sigma_s / 1.99).unwrap().is_some(),
            got,
            "sigma s = {sigma_s}"
        );
    }
    assert!(!brute_force_feasible(160) && brute_force_feasible(161));
}

#[test]
fn reference_exponent_examples() {
    assert!(exponent_feasible(1.9, 1.0).unwrap().is_some());
    assert!(exponent_feasible(1.6, 1.0).unwrap().is_none());
    let pair = exponent_feasible(1.9, 0.9).unwrap().unwrap();
    assert!((pair.p - 1.25).abs() < 1e-15 && (pair.q - 10.0 / 7.0).abs() < 1e-15);
    assert!((1.0 / pair.p + 1.0 / pair.q - 1.5).abs() < 1e-15);
    assert!((conjugate(pair.p) - pair.q).abs() < 1e-15);
    let x = 1.9 * 0.9 - 1.0;
    assert!((slack_p(1.25, x) + 2.0 - 10.0 / 3.0 * 0.71).abs() < 1e-12);
    assert!((slack_q(10.0 / 7.0, x) + 3.0 - 5.0 * 0.71).abs() < 1e-12);
    assert!(pair.slack_p > 0.0 && pair.slack_q > 0.0);
    assert!(exponent_feasible(2.0, 1.0).is_err());
    assert!(exponent_feasible(1.9, 0.0).is_err());
}

fn scalar(n: usize, seed: u64) -> SpectralScalar {
    let v = random_decay_field(n, 2.5, 0.0, seed, 0);
    SpectralScalar::from_coeffs(v.lattice().clone(), v.u1().to_vec(), Parity::Even).unwrap()
}

#[test]
fn lemma_ratio_trivial_inputs_and_single_triad() {
    let zero = SpectralScalar::zeros(3, Parity::Even);
    assert_eq!(
        product_estimate_ratio(&zero, &scalar(3, 1), 1.0, 0.1, 0.5).unwrap(),
        0.0
    );
    // f = g = 2 cos(2 pi x1): fg = 2 + 2 cos(4 pi x1), A fg has norm 4 pi sqrt2,
    // |A f| = 2 pi sqrt2, |A^2 f| = 4 pi^2 sqrt2.
    let mut f = SpectralScalar::zeros(2, Parity::Even);
    f.set(WaveIndex::new(1, 0, 0), Complex64::new(1.0, 0.0));
    f.set(WaveIndex::new(-1, 0, 0), Complex64::new(1.0, 0.0));
    let lhs = 4.0 * PI * 2f64.sqrt();
    let rhs = 2.0 * (2.0 * PI * 2f64.sqrt()) * (2.0 * PI).powi(2) * 2f64.sqrt();
    assert!((product_estimate_ratio(&f, &f, 1.0, 0.0, 0.5).unwrap() - lhs / rhs).abs() < 1e-15);
}

#[test]
fn lemma_ratio_envelope_is_stable_in_truncation() {
    let envelope = |n: usize| {
        (0..100u64)
            .map(|i| {
                product_estimate_ratio(&scalar(n, 2 * i), &scalar(n, 2 * i + 1), 1.0, 0.0, 0.5).unwrap()
            })
            .fold(0.0, f64::max)
    };
    let (a, b) = (envelope(8), envelope(16));
    assert!(a.is_finite() && b.is_finite() && a > 0.0);
    assert!(b / a < 2.0 && a / b < 2.0, "{a} vs {b}");
}

#[test]
fn nonlinear_ratio_trivial_inputs() {
    assert_eq!(
        nonlinear_estimate_ratio(&SpectralVelocity::zeros(3), 2.6, 0.0).unwrap(),
        0.0
    );
    let mut shear = SpectralVelocity::zeros(3);
    let half = Complex64::new(0.0, -0.5);
    shear.set(WaveIndex::new(0, 1, 0), [half, Complex64::default()]);
    shear.set(
        WaveIndex::new(0, -1, 0),
        [half.conj(), Complex64::default()],
    );
    assert_eq!(nonlinear_estimate_ratio(&shear, 2.6, 0.05).unwrap(), 0.0);
    assert!(nonlinear_estimate_ratio(&shear, 2.0, 0.05).is_err());
}

#[test]
fn estimators_are_deterministic_and_monotone_in_sample_count() {
    let a = estimate_c_sigma(2.6, 4, 40, 3).unwrap();
    assert_eq!(a, estimate_c_sigma(2.6, 4, 40, 3).unwrap());
    let b = estimate_c_sigma(2.6, 4, 80, 3).unwrap();
    assert!(b.max >= a.max && a.p95 <= a.max);
    assert!(matches!(
        estimate_c_sigma(2.6, 4, 0, 3),
        Err(Error::InsufficientSamples { .. })
    ));
    let c = estimate_c_star(1.9, 1.0, 4, 40, 3).unwrap();
    assert_eq!(c, estimate_c_star(1.9, 1.0, 4, 40, 3).unwrap());
    assert!(estimate_c_star(1.9, 1.0, 4, 80, 3).unwrap().max >= c.max);
}

#[test]
fn damping_threshold_examples() {
    let pass = damping_threshold_check(1.0, 2.6, 10f64.sqrt(), 1.0, 0.0, 0.5, 1.0).unwrap();
    assert!(pass.first && pass.second && pass.passes());
    let fail = damping_threshold_check(1.0, 2.6, 6f64.sqrt(), 1.0, 0.0, 0.5, 1.0).unwrap();
    assert!(!fail.second && !fail.passes());
}

#[test]
fn twisted_probe_reduces_to_transport_cancellation() {
    for seed in 0..5 {
        let u = projected(8, 2.0, seed);
        let q = nonlinear_q(&u, &u).unwrap().inner(&u).unwrap().abs() / u.l2_norm().powi(3);
        let at_zero = twisted_cancellation_probe(&u, 1.0, 0.0, 1.0).unwrap();
        assert!(at_zero <= 1e-10 && (at_zero - q).abs() <= 1e-14);
        assert!(twisted_cancellation_probe(&u, 1.0, 0.3, 0.0).unwrap() <= 0.3f64.exp() * 1e-10);
    }
}

#[test]
fn twisted_probe_is_reported_for_positive_s() {
    let u = projected(8, 2.0, 1);
    for w in [0.025, 0.05, 0.1] {
        let r = twisted_cancellation_probe(&u, 1.0, w, 1.0).unwrap();
        assert!(r.is_finite());
        println!("s = 1, nu W = {w}: |<B(U,U),U>| / |U|^3 = {r:.3e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ratios_are_scale_invariant(seed in any::<u64>(), c in 0.01f64..100.0, phi in 0.0f64..0.1) {
        let (f, g) = (scalar(3, seed), scalar(3, seed ^ 7));
        let a = product_estimate_ratio(&f, &g, 1.0, phi, 0.5).unwrap();
        let b = product_estimate_ratio(&f.scaled(c), &g.scaled(c), 1.0, phi, 0.5).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
        let u = projected(3, 3.0, seed);
        let a = nonlinear_estimate_ratio(&u, 2.6, phi).unwrap();
        let b = nonlinear_estimate_ratio(&u.scaled(c), 2.6, phi).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
    }
}
