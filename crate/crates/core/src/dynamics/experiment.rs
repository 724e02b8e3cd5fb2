//! High-probability global existence experiments: theorem-prescribed
//! parameters, the noise-intensity threshold and a path ensemble.

use rayon::prelude::*;

use super::config::SimConfig;
use super::run::{run_with_path, RunRecord, Status};
use crate::analysis::constants::{estimate_c_sigma, estimate_c_star};
use crate::error::{invalid, Error, Result};
use crate::field::SpectralVelocity;
use crate::gevrey::gevrey_norm;
use crate::stochastic::{binomial_std_error, sample_path_stream, wilson_interval};

/// Samples used when a constant has to be estimated on the fly.
pub const ESTIMATOR_SAMPLES: usize = 200;

/// `alpha = -4 ln eps`, so that `e^{-alpha/4} = eps`.
pub fn theorem_alpha(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(-4.0 * epsilon.ln())
}

/// Constant and initial norm entering the noise-intensity threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub constant: f64,
    pub v0_norm: f64,
    /// Smallest admissible `nu^2` (strict for diffusion).
    pub nu_sq: f64,
}

/// Diffusion: `nu^2 > 4 C* |V0|_{G_{alpha+eta}}`.
/// Damping: `nu^2 >= 8 C_sigma (eps^{-4} |V0|_{G^{sigma,1}_{phi0}} + 1) / phi0`.
pub fn threshold(v0: &SpectralVelocity, epsilon: f64, cfg: &SimConfig) -> Result<Threshold> {
    let alpha = theorem_alpha(epsilon)?;
    match cfg.noise.as_str() {
        "diffusion" => {
            let constant = match cfg.c_star {
                Some(c) => c,
                None => {
                    estimate_c_star(cfg.sigma, cfg.s, cfg.n.min(8), ESTIMATOR_SAMPLES, cfg.seed)?
                        .max
                }
            };
            let eta = cfg.eta.unwrap_or(alpha / 10.0);
            let v0_norm = gevrey_norm(v0, cfg.sigma, cfg.s, alpha + eta)?;
            Ok(Threshold {
                constant,
                v0_norm,
                nu_sq: 4.0 * constant * v0_norm,
            })
        }
        "damping" => {
            let constant = match cfg.c_sigma {
                Some(c) => c,
                None => estimate_c_sigma(cfg.sigma, cfg.n.min(8), ESTIMATOR_SAMPLES, cfg.seed)?.max,
            };
            let v0_norm = gevrey_norm(v0, cfg.sigma, 1.0, cfg.phi0)?;
            let nu_sq = 8.0 * constant / cfg.phi0 * (epsilon.powi(-4) * v0_norm + 1.0);
            Ok(Threshold {
                constant,
                v0_norm,
                nu_sq,
            })
        }
        other => Err(invalid(format!(
            "global experiments need diffusion or damping noise, got `{other}`"
        ))),
    }
}

#[derive(Debug, Clone)]
pub struct GlobalExperiment {
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub nu: f64,
    pub threshold: Threshold,
    pub config: SimConfig,
    pub records: Vec<RunRecord>,
    pub completed: usize,
    pub completed_fraction: f64,
    pub std_error: f64,
    pub ci: (f64, f64),
    /// Fraction of paths that stayed in the good set over their run.
    pub goodset_fraction: f64,
    pub target: f64,
}

/// Sets `alpha = -4 ln eps`, `beta = nu^2 / 4`, checks the noise-intensity
/// threshold, then runs `n_paths` paths (stream `i` of `template.seed`).
pub fn run_global_experiment(
    v0: &SpectralVelocity,
    epsilon: f64,
    template: &SimConfig,
    n_paths: usize,
) -> Result<GlobalExperiment> {
    if n_paths == 0 {
        return Err(Error::InsufficientSamples { got: 0, need: 1 });
    }
    let alpha = theorem_alpha(epsilon)?;
    let nu = template.nu;
    let beta = 0.25 * nu * nu;
    let th = threshold(v0, epsilon, template)?;
    let nu_sq = nu * nu;
    let ok = match template.noise.as_str() {
        "diffusion" => nu_sq > th.nu_sq,
        _ => nu_sq >= th.nu_sq,
    };
    if !ok {
        return Err(Error::Threshold(format!(
            "nu^2 = {nu_sq:.6} below the required {:.6} (constant {:.6}, |V0| = {:.6e})",
            th.nu_sq, th.constant, th.v0_norm
        )));
    }
    let mut cfg = template.clone();
    cfg.alpha = alpha;
    cfg.beta = beta;
    match cfg.noise.as_str() {
        "diffusion" => cfg.c_star = Some(th.constant),
        _ => cfg.c_sigma = Some(th.constant),
    }
    cfg.validate()?;
    let records = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let path = sample_path_stream(cfg.t_end, cfg.dt, cfg.seed, i)?;
            run_with_path(v0, &cfg, &path)
        })
        .collect::<Result<Vec<_>>>()?;
    let completed = records
        .iter()
        .filter(|r| r.status == Status::Completed)
        .count();
    let good = records.iter().filter(|r| r.goodset).count();
    Ok(GlobalExperiment {
        epsilon,
        alpha,
        beta,
        nu,
        threshold: th,
        records,
        completed,
        completed_fraction: completed as f64 / n_paths as f64,
        std_error: binomial_std_error(completed, n_paths),
        ci: wilson_interval(completed, n_paths),
        goodset_fraction: good as f64 / n_paths as f64,
        target: 1.0 - epsilon,
        config: cfg,
    })
}

/// Smallest `nu` meeting the threshold (the diffusion bound is strict; the
/// returned value sits on it).
pub fn minimal_nu(v0: &SpectralVelocity, epsilon: f64, cfg: &SimConfig) -> Result<f64> {
    Ok(threshold(v0, epsilon, cfg)?.nu_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_from_epsilon() {
        assert!((theorem_alpha(0.5).unwrap() - 4.0 * 2f64.ln()).abs() < 1e-15);
        assert!(theorem_alpha(1.0).is_err());
        assert!(theorem_alpha(0.0).is_err());
    }

    #[test]
    fn damping_threshold_formula() {
        let mut v0 = SpectralVelocity::zeros(2);
        let cfg = SimConfig {
            c_sigma: Some(0.3),
            phi0: 1.0,
            n: 2,
            ..SimConfig::damping()
        };
        let th = threshold(&v0, 0.1, &cfg).unwrap();
        assert!((th.nu_sq - 8.0 * 0.3).abs() < 1e-12);
        v0 = crate::initial::build("two-mode", 2, &crate::initial::InitialParams::default())
            .unwrap();
        let th = threshold(&v0, 0.1, &cfg).unwrap();
        assert!((th.nu_sq - 8.0 * 0.3 * (1e4 * th.v0_norm + 1.0)).abs() < 1e-9 * th.nu_sq);
    }
}
