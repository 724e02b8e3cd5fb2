//! Named verification suites behind one trait, used by `hydrostat verify`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::analysis::constants::{estimate_c_sigma, estimate_c_star};
use crate::analysis::exponents::exponent_feasible;
use crate::analysis::probes::product_estimate_ratio;
use crate::dynamics::config::SimConfig;
use crate::dynamics::run::run_with_observer;
use crate::error::Result;
use crate::field::{FourierField, Parity, SpectralScalar, SpectralVelocity};
use crate::initial::{build, random_decay_field, InitialParams};
use crate::lattice::WaveIndex;
use crate::picard::{fixed_point_solve, smoothing_kernel_bound_probe, MildProblem};
use crate::registry::{Named, Registry};
use crate::spectral::nonlinear_q;
use crate::stochastic::BrownianPath;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n: 8,
            samples: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            passed: value <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    fn new(suite: &'static str, checks: Vec<Check>) -> Self {
        SuiteReport {
            suite,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

pub trait VerifySuite: Named + Send + Sync {
    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport>;
}

/// `|<Q(V,V), V>| / |V|^3` on random projected fields.
#[derive(Debug, Default, Clone, Copy)]
pub struct Cancellation;

impl Named for Cancellation {
    fn name(&self) -> &'static str {
        "cancellation"
    }
}

impl VerifySuite for Cancellation {
    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let mut worst = 0.0f64;
        for i in 0..opts.samples as u64 {
            let v = random_decay_field(opts.n, 2.0, 0.0, opts.seed, i);
            let v = v.scaled(1.0 / v.l2_norm());
            worst = worst.max(nonlinear_q(&v, &v)?.inner(&v)?.abs());
        }
        Ok(SuiteReport::new(
            self.name(),
            vec![Check::at_most("max |<Q(V,V),V>| / |V|^3", worst, 1e-10)],
        ))
    }
}

/// Feasibility verdicts for `sigma s = 1.55, 1.60, ..., 1.95`; the expected
/// verdict is feasible exactly when `sigma s > 8/5`.
#[derive(Debug, Default, Clone, Copy)]
pub struct Exponents;

impl Named for Exponents {
    fn name(&self) -> &'static str {
        "exponents"
    }
}

impl VerifySuite for Exponents {
    fn run(&self, _opts: &VerifyOptions) -> Result<SuiteReport> {
        let mut checks = Vec::new();
        for i in 0..9 {
            let sigma_s = (155 + 5 * i) as f64 / 100.0;
            let feasible = exponent_feasible(sigma_s, 1.0)?.is_some();
            let expected = 5 * (155 + 5 * i) > 800;
            checks.push(Check {
                name: format!("sigma s = {sigma_s:.2} feasible"),
                value: f64::from(u8::from(feasible)),
                bound: f64::from(u8::from(expected)),
                passed: feasible == expected,
            });
        }
        Ok(SuiteReport::new(self.name(), checks))
    }
}

/// Product estimate: the single-triad hand value plus finiteness on random pairs.
#[derive(Debug, Default, Clone, Copy)]
pub struct ProductEstimate;

impl Named for ProductEstimate {
    fn name(&self) -> &'static str {
        "product-estimate"
    }
}

impl VerifySuite for ProductEstimate {
    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let mut f = SpectralScalar::zeros(opts.n.max(2), Parity::Even);
        f.set(WaveIndex::new(1, 0, 0), Complex64::new(1.0, 0.0));
        f.set(WaveIndex::new(-1, 0, 0), Complex64::new(1.0, 0.0));
        let expect = PI * 2f64.sqrt() / (2.0 * PI).powi(3);
        let hand = product_estimate_ratio(&f, &f, 1.0, 0.0, 0.5)?;
        let mut worst = 0.0f64;
        for i in 0..opts.samples as u64 {
            let scalar = |stream| {
                let v = random_decay_field(opts.n, 2.5, 0.0, opts.seed, stream);
                SpectralScalar::from_coeffs(v.lattice().clone(), v.u1().to_vec(), Parity::Even)
            };
            let (a, b) = (scalar(2 * i)?, scalar(2 * i + 1)?);
            for phi in [0.0, 0.1] {
                worst = worst.max(product_estimate_ratio(&a, &b, 1.0, phi, 0.5)?);
            }
        }
        Ok(SuiteReport::new(
            self.name(),
            vec![
                Check::at_most(
                    "single triad |ratio - pi sqrt2 / (2 pi)^3| / value",
                    (hand - expect).abs() / expect,
                    1e-12,
                ),
                Check {
                    name: "max ratio on random pairs".into(),
                    value: worst,
                    bound: f64::INFINITY,
                    passed: worst.is_finite(),
                },
            ],
        ))
    }
}

/// Empirical transport constants; the suite passes when both are finite and positive.
#[derive(Debug, Default, Clone, Copy)]
pub struct NonlinearEstimate;

impl Named for NonlinearEstimate {
    fn name(&self) -> &'static str {
        "nonlinear-estimate"
    }
}

impl VerifySuite for NonlinearEstimate {
    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let cs = estimate_c_sigma(2.6, opts.n, opts.samples, opts.seed)?;
        let cstar = estimate_c_star(1.9, 1.0, opts.n, opts.samples, opts.seed)?;
        let ok = |v: f64| v.is_finite() && v > 0.0;
        Ok(SuiteReport::new(
            self.name(),
            vec![
                Check {
                    name: "C_sigma (sigma = 2.6)".into(),
                    value: cs.max,
                    bound: f64::INFINITY,
                    passed: ok(cs.max),
                },
                Check {
                    name: "C* (sigma = 1.9, s = 1)".into(),
                    value: cstar.max,
                    bound: f64::INFINITY,
                    passed: ok(cstar.max),
                },
            ],
        ))
    }
}

/// Picard fixed point against the Lawson stepper on the zero path, at `N = 2`.
#[derive(Debug, Default, Clone, Copy)]
pub struct PicardConsistency;

impl Named for PicardConsistency {
    fn name(&self) -> &'static str {
        "picard-consistency"
    }
}

/// Sup over the Picard nodes of the Gevrey distance between the fixed point
/// and a stepper run with step `t_end / nodes`, relative to the initial norm.
pub fn picard_stepper_gap(u0: &SpectralVelocity, cfg: &SimConfig, nodes: usize) -> Result<f64> {
    let mut cfg = cfg.clone();
    cfg.dt = cfg.t_end / nodes as f64;
    let mut prob = MildProblem::new(u0.clone(), cfg.clone(), cfg.t_end)?;
    prob.nodes = nodes;
    let path = BrownianPath::zero(cfg.t_end, cfg.dt)?;
    let fp = fixed_point_solve(&prob, &path)?;
    let mut states = Vec::with_capacity(nodes + 1);
    run_with_observer(u0, &cfg, &path, &mut |_, u| states.push(u.clone()))?;
    if states.len() != nodes + 1 {
        return Err(crate::error::Error::GridMismatch(format!(
            "stepper produced {} states for {} nodes",
            states.len(),
            nodes
        )));
    }
    Ok(prob.sup_distance(&fp.trajectory, &states)? / cfg.gevrey_norm(u0, prob.radius(0.0))?)
}

impl VerifySuite for PicardConsistency {
    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let cfg = SimConfig {
            n: 2,
            t_end: 0.05,
            ..SimConfig::diffusion()
        };
        let u0 = build(
            "two-mode",
            2,
            &InitialParams {
                amplitude: 1e-2,
                seed: opts.seed,
                ..InitialParams::default()
            },
        )?;
        let coarse = picard_stepper_gap(&u0, &cfg, 16)?;
        let fine = picard_stepper_gap(&u0, &cfg, 32)?;
        Ok(SuiteReport::new(
            self.name(),
            vec![
                Check::at_most("relative gap, 16 nodes", coarse, 1e-3),
                Check {
                    name: "gap ratio fine / coarse".into(),
                    value: fine / coarse,
                    bound: 0.6,
                    passed: fine / coarse <= 0.6 || fine < 1e-13,
                },
            ],
        ))
    }
}

/// Sampled smoothing-kernel ratio against `(sigma / (nu^2 - 2 beta))^sigma e^{-sigma}`,
/// which bounds it for `|k| >= 1`.
#[derive(Debug, Default, Clone, Copy)]
pub struct KernelBound;

impl Named for KernelBound {
    fn name(&self) -> &'static str {
        "kernel-bound"
    }
}

pub fn kernel_closed_bound(sigma: f64, nu: f64, beta: f64) -> f64 {
    (sigma / (nu * nu - 2.0 * beta)).powf(sigma) * (-sigma).exp()
}

impl VerifySuite for KernelBound {
    fn run(&self, opts: &VerifyOptions) -> Result<SuiteReport> {
        let kmax = 2.0 * PI * opts.n as f64 * 3f64.sqrt();
        let mut checks = Vec::new();
        for (nu, beta) in [(2.0, 0.5), (1.0, 0.25), (4.0, 4.0)] {
            let probe = smoothing_kernel_bound_probe(1.9, 1.0, nu, beta, kmax.max(2.0 * PI), 200)?;
            let bound = kernel_closed_bound(1.9, nu, beta);
            checks.push(Check::at_most(
                format!("nu = {nu}, beta = {beta}"),
                probe,
                bound * (1.0 + 1e-12),
            ));
        }
        Ok(SuiteReport::new(self.name(), checks))
    }
}

pub fn registry() -> &'static Registry<dyn VerifySuite> {
    static REG: OnceLock<Registry<dyn VerifySuite>> = OnceLock::new();
    REG.get_or_init(|| {
        let items: [Arc<dyn VerifySuite>; 6] = [
            Arc::new(Cancellation),
            Arc::new(Exponents),
            Arc::new(ProductEstimate),
            Arc::new(NonlinearEstimate),
            Arc::new(PicardConsistency),
            Arc::new(KernelBound),
        ];
        items
            .into_iter()
            .fold(Registry::new("verification suite"), Registry::with)
    })
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    registry().get(name)?.run(opts)
}
