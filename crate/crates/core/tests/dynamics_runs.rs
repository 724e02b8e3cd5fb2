mod common;

use common::projected;
use hydrostat::analysis::estimate_c_star;
use hydrostat::dynamics::experiment::threshold;
use hydrostat::dynamics::run::{recover_v, step_damping, step_diffusion};
use hydrostat::dynamics::{run, run_with_path, theorem_alpha, RadiusSchedule, SimConfig, Status};
use hydrostat::gevrey::gevrey_norm;
use hydrostat::initial::{build, InitialParams};
use hydrostat::stochastic::{sample_path_stream, BrownianPath, GoodSetParams};
use hydrostat::{FourierField, SpectralVelocity};

fn two_mode(n: usize, amplitude: f64) -> SpectralVelocity {
    build(
        "two-mode",
        n,
        &InitialParams {
            amplitude,
            ..InitialParams::default()
        },
    )
    .unwrap()
}

fn rel(a: &SpectralVelocity, b: &SpectralVelocity) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

#[test]
fn zero_datum_stays_zero() {
    for cfg in [
        SimConfig::diffusion(),
        SimConfig::damping(),
        SimConfig::deterministic(),
    ] {
        let cfg = SimConfig {
            n: 3,
            t_end: 0.05,
            alpha: 5.0,
            c_sigma: Some(1e-3),
            ..cfg
        };
        let rec = run(&SpectralVelocity::zeros(3), &cfg).unwrap();
        assert_eq!(rec.status, Status::Completed, "{}", cfg.noise);
        assert!(rec.final_state.is_zero());
        assert!(rec
            .samples
            .iter()
            .all(|s| s.gevrey_u == 0.0 && s.l2_u == 0.0));
        assert!(rec.samples.windows(2).all(|w| w[1].t > w[0].t));
    }
    let zero_path = BrownianPath::zero(1.0, 0.01).unwrap();
    let cfg = SimConfig {
        n: 2,
        ..SimConfig::diffusion()
    };
    assert!(
        step_diffusion(&SpectralVelocity::zeros(2), 0.0, 0.01, &zero_path, &cfg)
            .unwrap()
            .is_zero()
    );
    let cfg = SimConfig {
        n: 2,
        c_sigma: Some(1e-3),
        ..SimConfig::damping()
    };
    assert!(
        step_damping(&SpectralVelocity::zeros(2), 0.0, 0.01, &zero_path, &cfg)
            .unwrap()
            .is_zero()
    );
}

#[test]
fn linear_single_mode_decays_by_its_propagator() {
    let u0 = build(
        "single-mode",
        2,
        &InitialParams {
            amplitude: 1.0,
            ..InitialParams::default()
        },
    )
    .unwrap();
    let k = (2.0f64).sqrt() * 2.0 * std::f64::consts::PI;
    let path = sample_path_stream(0.1, 1e-3, 4, 0).unwrap();
    let cfg = SimConfig {
        n: 2,
        t_end: 0.1,
        s: 0.9,
        sigma: 1.9,
        nu: 1.5,
        alpha: 5.0,
        linear_only: true,
        ..SimConfig::diffusion()
    };
    let rec = run_with_path(&u0, &cfg, &path).unwrap();
    let expect = u0.scaled((-0.5 * 1.5f64.powi(2) * 0.1 * k.powf(1.8)).exp());
    assert!(rel(&rec.final_state, &expect) < 1e-12);
}

#[test]
fn steps_preserve_the_constraints() {
    let u = projected(4, 2.0, 3).scaled(0.5);
    let path = sample_path_stream(1.0, 1e-2, 8, 0).unwrap();
    let cfg = SimConfig {
        n: 4,
        ..SimConfig::diffusion()
    };
    let mut v = u.clone();
    for i in 0..10 {
        v = step_diffusion(&v, i as f64 * 1e-2, 1e-2, &path, &cfg).unwrap();
        assert!(v.check_invariants().holds(1e-12));
    }
    let cfg = SimConfig {
        n: 4,
        c_sigma: Some(1e-3),
        ..SimConfig::damping()
    };
    let mut v = u;
    for i in 0..10 {
        v = step_damping(&v, i as f64 * 1e-2, 1e-2, &path, &cfg).unwrap();
        assert!(v.check_invariants().holds(1e-12));
    }
}

/// `|S_h(u) - S_{h/2}(S_{h/2}(u))|` for the configured scheme on the zero path.
fn richardson_defect(cfg: &SimConfig, u: &SpectralVelocity, h: f64) -> f64 {
    let path = BrownianPath::zero(1.0, h / 2.0).unwrap();
    let full = step_diffusion(u, 0.0, h, &path, cfg).unwrap();
    let half = step_diffusion(u, 0.0, h / 2.0, &path, cfg).unwrap();
    let two = step_diffusion(&half, 0.0, h / 2.0, &path, cfg).unwrap();
    full.sub(&two).unwrap().l2_norm()
}

#[test]
fn self_convergence_at_scheme_order() {
    let u = projected(2, 1.0, 21).scaled(2.0);
    for (scheme, order) in [("euler", 1), ("rk2", 2), ("rk4", 4)] {
        let cfg = SimConfig {
            n: 2,
            scheme: scheme.into(),
            nu: 0.5,
            beta: 0.1,
            ..SimConfig::diffusion()
        };
        let a = richardson_defect(&cfg, &u, 4e-3);
        let b = richardson_defect(&cfg, &u, 2e-3);
        let observed = (a / b).log2();
        assert!(
            (observed - (order + 1) as f64).abs() < 0.25,
            "{scheme}: {observed}"
        );
    }
}

#[test]
fn weak_damping_on_the_zero_path_matches_the_deterministic_baseline() {
    let u0 = two_mode(3, 0.5);
    let det = SimConfig {
        n: 3,
        t_end: 0.2,
        dt: 1e-3,
        ..SimConfig::deterministic()
    };
    let damp = SimConfig {
        nu: 1e-6,
        beta: 1e-14,
        alpha: 1e-3,
        c_sigma: Some(1e-3),
        phi0: 0.2,
        ..SimConfig::damping()
    };
    // The damping radius formula degenerates as nu -> 0; hold the radius fixed.
    let damp = SimConfig {
        n: 3,
        t_end: 0.2,
        dt: 1e-3,
        radius: Some(RadiusSchedule::constant(0.2)),
        ..damp
    };
    let path = BrownianPath::zero(0.2, 1e-3).unwrap();
    let a = run_with_path(&u0, &det, &path).unwrap();
    let b = run_with_path(&u0, &damp, &path).unwrap();
    assert_eq!(b.status, Status::Completed);
    assert!(rel(&b.final_state, &a.final_state) < 1e-10);
}

#[test]
fn deterministic_run_conserves_energy() {
    let u0 = two_mode(4, 0.3)
        .axpy(1.0, &projected(4, 3.0, 2).scaled(0.1))
        .unwrap();
    let cfg = SimConfig {
        n: 4,
        t_end: 0.5,
        dt: 1e-3,
        ..SimConfig::deterministic()
    };
    let rec = run(&u0, &cfg).unwrap();
    assert_eq!(rec.status, Status::Completed);
    let e0 = u0.l2_norm();
    for s in &rec.samples {
        assert!((s.l2_u - e0).abs() <= 1e-6 * e0);
    }
}

#[test]
fn recovery_of_v() {
    let u = projected(3, 2.0, 6);
    let cfg = SimConfig {
        n: 3,
        ..SimConfig::diffusion()
    };
    assert!(rel(&recover_v(&u, 0.0, 0.0, &cfg).unwrap(), &u) == 0.0);
    let damp = SimConfig {
        n: 3,
        nu: 2.0,
        ..SimConfig::damping()
    };
    let damp = SimConfig {
        radius: Some(RadiusSchedule::constant(0.2)),
        ..damp
    };
    let v = recover_v(&u, 3f64.ln() / 2.0, 0.0, &damp).unwrap();
    assert!(rel(&v, &u.scaled(3.0)) < 1e-15);

    // With nu W <= phi(t): |V|_{G_eta} <= sqrt2 |U|_{G_{phi + eta}}.
    let eta = cfg.eta_value();
    for (t, w) in [(0.0, 0.05), (0.5, 0.2), (1.0, -0.3), (1.0, 0.349)] {
        let phi = cfg.alpha + cfg.beta * t;
        let v = recover_v(&u, w, t, &cfg).unwrap();
        let lhs = gevrey_norm(&v, cfg.sigma, cfg.s, eta).unwrap();
        let rhs = 2f64.sqrt() * gevrey_norm(&u, cfg.sigma, cfg.s, phi + eta).unwrap();
        assert!(lhs <= rhs, "t = {t}, w = {w}");
    }
    assert!(recover_v(&u, 1.0, 0.0, &cfg).is_err());
}

#[test]
fn damping_radius_limit() {
    let (phi0, alpha, beta, nu, c, v0) = (1.0, 0.5, 0.2, 2.0, 0.05, 0.3);
    let r = RadiusSchedule::damping(phi0, alpha, beta, nu, c, v0);
    let limit = phi0 - 4.0 * c / (nu * nu - 2.0 * beta) * (alpha.exp() * v0 + 1.0);
    assert_eq!(r.eval(0.0), phi0);
    assert!((r.limit().unwrap() - limit).abs() < 1e-15);
    assert!((r.eval(1e3) - limit).abs() < 1e-12);
    assert!(r.eval(0.3) > r.eval(0.6));
}

#[test]
fn theorem_parameters() {
    let alpha = theorem_alpha(0.5).unwrap();
    assert!((alpha - 2.7726).abs() < 1e-4);
    for nu in [0.5, 1.0, 7.0] {
        let p = GoodSetParams::new(alpha, nu * nu / 4.0, nu).unwrap();
        assert!((p.lower_bound() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn damping_threshold_with_estimated_constant() {
    let cfg = SimConfig {
        n: 4,
        phi0: 1.0,
        ..SimConfig::damping()
    };
    let v0 = two_mode(4, 1.0);
    let v0 = v0.scaled(0.01 / gevrey_norm(&v0, cfg.sigma, 1.0, 1.0).unwrap());
    let th = threshold(&v0, 0.1, &cfg).unwrap();
    let c = hydrostat::analysis::estimate_c_sigma(cfg.sigma, 4, 200, cfg.seed)
        .unwrap()
        .max;
    assert_eq!(th.constant, c);
    assert!((th.v0_norm - 0.01).abs() < 1e-15);
    assert!((th.nu_sq - 8.0 * c * (1e4 * 0.01 + 1.0)).abs() < 1e-12 * th.nu_sq);
}

#[test]
fn terminal_statuses() {
    let u0 = two_mode(3, 0.5);
    // Radius crosses zero immediately when the transport constant is huge.
    let cfg = SimConfig {
        n: 3,
        t_end: 1.0,
        dt: 1e-2,
        c_sigma: Some(1e3),
        phi0: 0.2,
        ..SimConfig::damping()
    };
    assert_eq!(run(&u0, &cfg).unwrap().status, Status::RadiusExhausted);

    let up = BrownianPath::from_values(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 1.0]).unwrap();
    let cfg = SimConfig {
        n: 3,
        t_end: 1.0,
        dt: 0.01,
        ..SimConfig::diffusion()
    };
    let rec = run_with_path(&u0, &cfg, &up).unwrap();
    assert_eq!(rec.status, Status::GoodsetExit);
    assert!((rec.t_final - 0.5).abs() < 1e-12);
    assert!(!rec.goodset);

    let cfg = SimConfig {
        n: 3,
        t_end: 0.5,
        dt: 1e-3,
        phi0: 0.2,
        blowup_factor: 1.0 + 1e-9,
        ..SimConfig::deterministic()
    };
    let rec = run(&two_mode(3, 5.0), &cfg).unwrap();
    assert_eq!(rec.status, Status::Blowup);
    assert!(rec.t_final < 0.5);
}

#[test]
fn diffusion_norm_is_monotone_above_the_estimated_threshold() {
    let n = 4;
    let cfg = SimConfig {
        n,
        t_end: 0.2,
        dt: 1e-3,
        nu: 3.0,
        beta: 1.0,
        alpha: 0.2,
        ..SimConfig::diffusion()
    };
    let c_star = estimate_c_star(cfg.sigma, cfg.s, n, 200, 0).unwrap().max;
    let u0 = projected(n, 3.0, 12).scaled(0.05);
    let u_norm = gevrey_norm(&u0, cfg.sigma, cfg.s, cfg.alpha + cfg.eta_value()).unwrap();
    assert!(c_star * u_norm < cfg.nu * cfg.nu - 2.0 * cfg.beta);
    let rec = run_with_path(&u0, &cfg, &BrownianPath::zero(0.2, 1e-3).unwrap()).unwrap();
    assert_eq!(rec.status, Status::Completed);
    for w in rec.samples.windows(2) {
        assert!(
            w[1].gevrey_u <= w[0].gevrey_u * (1.0 + 1e-12),
            "{} -> {}",
            w[0].gevrey_u,
            w[1].gevrey_u
        );
    }
}
