//! Mild formulation of the random-diffusion equation and its Picard iteration:
//!
//! ```text
//! Phi(U)(t) = E(t) U0 + int_0^t E(t - r) N_{W(r)}(U(r)) dr,   E(t) = e^{-nu^2 t A^{2s} / 2}
//! ```
//!
//! The integral is the composite trapezoid rule on a uniform node grid. The
//! integrand is smooth at finite truncation, so no singular quadrature is needed.

use crate::dynamics::config::SimConfig;
use crate::dynamics::noise::Frozen;
use crate::dynamics::run::Stepper;
use crate::error::{invalid, Error, Result};
use crate::field::{FourierField, SpectralVelocity};
use crate::gevrey::{norm, GevreyParams, NormKind};
use crate::spectral::project_constraints;
use crate::stochastic::BrownianPath;

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone)]
pub struct MildProblem {
    pub u0: SpectralVelocity,
    /// Must use the `diffusion` noise model.
    pub cfg: SimConfig,
    pub t_end: f64,
    /// Number of quadrature intervals; the grid has `nodes + 1` points.
    pub nodes: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Radius of the ball the iterates are expected to stay in.
    pub ball_radius: f64,
    /// Test hook: drop the nonlinear term.
    pub linear_only: bool,
}

impl MildProblem {
    /// Defaults with `R = 2 sqrt 2 |e^{alpha A^s} U0|_{Hdot^{sigma s}}`.
    pub fn new(u0: SpectralVelocity, cfg: SimConfig, t_end: f64) -> Result<Self> {
        let ball_radius = 2.0
            * 2f64.sqrt()
            * norm(
                &u0,
                NormKind::GevreyDot,
                &GevreyParams::new(cfg.sigma, cfg.s, cfg.alpha)?,
            )?;
        let p = MildProblem {
            u0,
            cfg,
            t_end,
            nodes: DEFAULT_NODES,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            ball_radius,
            linear_only: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cfg.noise != "diffusion" {
            return Err(invalid(format!(
                "the mild formulation is set up for diffusion noise, got `{}`",
                self.cfg.noise
            )));
        }
        self.cfg.validate()?;
        if !(self.t_end > 0.0)
            || self.nodes == 0
            || !(self.tolerance > 0.0)
            || self.max_iterations == 0
        {
            return Err(invalid(
                "need T > 0, at least one node interval, tolerance > 0 and max_iterations > 0",
            ));
        }
        if self.u0.truncation() != self.cfg.n {
            return Err(Error::TruncationMismatch {
                left: self.u0.truncation(),
                right: self.cfg.n,
            });
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.t_end / self.nodes as f64;
        (0..=self.nodes)
            .map(|i| {
                if i == self.nodes {
                    self.t_end
                } else {
                    i as f64 * h
                }
            })
            .collect()
    }

    /// `phi(t) + eta` with `phi = alpha + beta t`.
    pub fn radius(&self, t: f64) -> f64 {
        self.cfg.alpha + self.cfg.beta * t + self.cfg.eta_value()
    }

    fn stepper(&self) -> Result<Stepper> {
        let kmax = self.u0.lattice().max_magnitude();
        Stepper::new(&self.cfg, self.radius(self.t_end) * kmax.powf(self.cfg.s))
    }

    /// Sup over the grid of `|a_i - b_i|` in the Gevrey norm at `phi(t_i) + eta`.
    pub fn sup_distance(&self, a: &[SpectralVelocity], b: &[SpectralVelocity]) -> Result<f64> {
        if a.len() != b.len() || a.len() != self.nodes + 1 {
            return Err(Error::GridMismatch(format!(
                "{} vs {} nodes (expected {})",
                a.len(),
                b.len(),
                self.nodes + 1
            )));
        }
        let times = self.times();
        let mut sup = 0.0f64;
        for ((x, y), &t) in a.iter().zip(b).zip(&times) {
            sup = sup.max(self.cfg.gevrey_norm(&x.sub(y)?, self.radius(t))?);
        }
        Ok(sup)
    }

    fn sup_norm(&self, a: &[SpectralVelocity]) -> Result<f64> {
        let times = self.times();
        a.iter().zip(&times).try_fold(0.0f64, |m, (x, &t)| {
            Ok(m.max(self.cfg.gevrey_norm(x, self.radius(t))?))
        })
    }
}

/// `Phi(U)` on the node grid.
pub fn duhamel_apply(
    traj: &[SpectralVelocity],
    prob: &MildProblem,
    path: &BrownianPath,
) -> Result<Vec<SpectralVelocity>> {
    let stepper = prob.stepper()?;
    duhamel_with(&stepper, traj, prob, path)
}

fn duhamel_with(
    stepper: &Stepper,
    traj: &[SpectralVelocity],
    prob: &MildProblem,
    path: &BrownianPath,
) -> Result<Vec<SpectralVelocity>> {
    if traj.len() != prob.nodes + 1 {
        return Err(Error::GridMismatch(format!(
            "trajectory has {} nodes, expected {}",
            traj.len(),
            prob.nodes + 1
        )));
    }
    if path.horizon() < prob.t_end * (1.0 - 1e-12) {
        return Err(invalid(format!(
            "path horizon {} shorter than T = {}",
            path.horizon(),
            prob.t_end
        )));
    }
    let times = prob.times();
    let cfg = &prob.cfg;
    let integrands = traj
        .iter()
        .zip(&times)
        .map(|(u, &t)| {
            if prob.linear_only {
                return Ok(SpectralVelocity::zeros_on(u.lattice().clone()));
            }
            let frozen = Frozen {
                nu: cfg.nu,
                s: cfg.s,
                w: path.value_at(t),
                backend: stepper.backend.as_ref(),
            };
            stepper.model.nonlinear(u, &frozen)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(traj.len());
    out.push(project_constraints(&prob.u0));
    // I_i = E(h) I_{i-1} + h/2 (E(h) N_{i-1} + N_i)
    let mut integral = SpectralVelocity::zeros_on(prob.u0.lattice().clone());
    for i in 1..times.len() {
        let h = times[i] - times[i - 1];
        let carried = stepper
            .prop
            .apply(&integral.axpy(0.5 * h, &integrands[i - 1])?, h);
        integral = carried.axpy(0.5 * h, &integrands[i])?;
        let value = stepper
            .prop
            .apply(&prob.u0, times[i])
            .axpy(1.0, &integral)?;
        out.push(project_constraints(&value));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub trajectory: Vec<SpectralVelocity>,
    pub times: Vec<f64>,
    pub iterations: usize,
    /// Last measured `|Phi(U_{n+1}) - Phi(U_n)| / |U_{n+1} - U_n|`.
    pub contraction_estimate: f64,
    pub max_contraction: f64,
    /// Successive sup differences, one per iteration.
    pub differences: Vec<f64>,
    /// Largest sup norm of any iterate.
    pub max_iterate_norm: f64,
    pub ball_radius: f64,
}

/// Iterates `U <- Phi(U)` from the constant trajectory `U0`.
pub fn fixed_point_solve(prob: &MildProblem, path: &BrownianPath) -> Result<FixedPoint> {
    prob.validate()?;
    let stepper = prob.stepper()?;
    let mut current = vec![prob.u0.clone(); prob.nodes + 1];
    let mut differences = Vec::new();
    let mut max_norm = prob.sup_norm(&current)?;
    let mut last_ratio = 0.0f64;
    let mut max_ratio = 0.0f64;
    for iteration in 1..=prob.max_iterations {
        let next = duhamel_with(&stepper, &current, prob, path)?;
        let diff = prob.sup_distance(&next, &current)?;
        max_norm = max_norm.max(prob.sup_norm(&next)?);
        if let Some(&prev) = differences.last() {
            if prev > 0.0 {
                last_ratio = diff / prev;
                max_ratio = max_ratio.max(last_ratio);
            }
        }
        differences.push(diff);
        current = next;
        if diff < prob.tolerance {
            return Ok(FixedPoint {
                trajectory: current,
                times: prob.times(),
                iterations: iteration,
                contraction_estimate: last_ratio,
                max_contraction: max_ratio,
                differences,
                max_iterate_norm: max_norm,
                ball_radius: prob.ball_radius,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: prob.max_iterations,
        last_difference: differences.last().copied().unwrap_or(f64::NAN),
    })
}

/// `|k|^{2 sigma s} e^{2 (beta |k|^s - nu^2 |k|^{2s} / 2) tau} tau^sigma`
pub fn kernel_ratio(k: f64, tau: f64, sigma: f64, s: f64, nu: f64, beta: f64) -> f64 {
    let ks = k.powf(s);
    (2.0 * sigma * s * k.ln()
        + 2.0 * (beta * ks - 0.5 * nu * nu * ks * ks) * tau
        + sigma * tau.ln())
    .exp()
}

/// Maximum of [`kernel_ratio`] over `|k|` in `[2 pi, kmax]` and
/// `tau` in `[1e-4, 1]`, both log-spaced with `n_samples` points.
pub fn smoothing_kernel_bound_probe(
    sigma: f64,
    s: f64,
    nu: f64,
    beta: f64,
    kmax: f64,
    n_samples: usize,
) -> Result<f64> {
    if !(beta < 0.5 * nu * nu) {
        return Err(invalid(format!(
            "the kernel bound needs beta < nu^2/2 (beta = {beta}, nu = {nu})"
        )));
    }
    let kmin = 2.0 * std::f64::consts::PI;
    if !(kmax >= kmin) || n_samples < 2 {
        return Err(invalid(
            "need kmax >= 2 pi and at least two samples per axis",
        ));
    }
    let logspace = |a: f64, b: f64, i: usize| {
        (a.ln() + (b.ln() - a.ln()) * i as f64 / (n_samples - 1) as f64).exp()
    };
    let mut best = 0.0f64;
    for i in 0..n_samples {
        let k = logspace(kmin, kmax, i);
        for j in 0..n_samples {
            best = best.max(kernel_ratio(k, logspace(1e-4, 1.0, j), sigma, s, nu, beta));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_ratio_vanishes_as_tau_shrinks() {
        let k = 2.0 * std::f64::consts::PI;
        let a = kernel_ratio(k, 1e-6, 1.9, 1.0, 2.0, 0.5);
        let b = kernel_ratio(k, 1e-9, 1.9, 1.0, 2.0, 0.5);
        assert!(b < a * 1e-5);
    }

    #[test]
    fn kernel_probe_rejects_large_beta() {
        assert!(smoothing_kernel_bound_probe(1.9, 1.0, 1.0, 0.5, 50.0, 10).is_err());
        assert!(smoothing_kernel_bound_probe(1.9, 1.0, 2.0, 0.5, 50.0, 10)
            .unwrap()
            .is_finite());
    }
}
