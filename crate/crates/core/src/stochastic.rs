//! Seeded Brownian paths, the good sample set `{alpha + beta t - nu W_t >= 0}`
//! and Monte Carlo estimates of its probability.
//!
//! Every path is drawn from its own ChaCha8 stream `(seed, stream)`, so an
//! ensemble is independent of evaluation order and thread count.
//!
//! Paths sampled from the same seed with different `dt` are not refinements
//! of each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::dynamics::radius::RadiusSchedule;
use crate::error::{invalid, Error, Result};

/// Minimum ensemble size accepted by [`good_set_probability`].
pub const MIN_PATHS: usize = 100;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

pub fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn grid(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(invalid(format!("horizon must be positive, got {t_end}")));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let steps = grid_steps(t_end, dt);
    let mut times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
    times[steps] = t_end;
    Ok(times)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    pub dt: f64,
}

impl BrownianPath {
    /// A path with prescribed grid values (first value must be 0).
    pub fn from_values(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(invalid(
                "times and values must be non-empty and of equal length",
            ));
        }
        if times[0] != 0.0 || values[0] != 0.0 {
            return Err(invalid("a Brownian path starts at t = 0 with W = 0"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("path times must be strictly increasing"));
        }
        let dt = if times.len() > 1 {
            times[1] - times[0]
        } else {
            0.0
        };
        Ok(BrownianPath {
            times,
            values,
            seed: 0,
            stream: 0,
            dt,
        })
    }

    /// The identically zero path on the grid of `(t_end, dt)`.
    pub fn zero(t_end: f64, dt: f64) -> Result<Self> {
        let times = grid(t_end, dt)?;
        let values = vec![0.0; times.len()];
        Ok(BrownianPath {
            times,
            values,
            seed: 0,
            stream: 0,
            dt,
        })
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty path")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn index_at(&self, t: f64) -> usize {
        let tol = 1e-9 * self.dt.max(f64::MIN_POSITIVE);
        self.times
            .partition_point(|&s| s <= t + tol)
            .saturating_sub(1)
    }

    /// Value at the last grid point not after `t` (piecewise constant).
    pub fn value_at(&self, t: f64) -> f64 {
        self.values[self.index_at(t)]
    }

    pub fn max_value_until(&self, t: f64) -> f64 {
        let end = self.index_at(t);
        self.values[..=end]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Stream 0 of `seed`.
pub fn sample_path(t_end: f64, dt: f64, seed: u64) -> Result<BrownianPath> {
    sample_path_stream(t_end, dt, seed, 0)
}

pub fn sample_path_stream(t_end: f64, dt: f64, seed: u64, stream: u64) -> Result<BrownianPath> {
    let times = grid(t_end, dt)?;
    let mut rng = path_rng(seed, stream);
    let mut values = Vec::with_capacity(times.len());
    values.push(0.0);
    let mut w = 0.0;
    for pair in times.windows(2) {
        let z: f64 = rng.sample(StandardNormal);
        w += (pair[1] - pair[0]).sqrt() * z;
        values.push(w);
    }
    Ok(BrownianPath {
        times,
        values,
        seed,
        stream,
        dt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodSetParams {
    pub alpha: f64,
    pub beta: f64,
    pub nu: f64,
}

impl GoodSetParams {
    pub fn new(alpha: f64, beta: f64, nu: f64) -> Result<Self> {
        let p = GoodSetParams { alpha, beta, nu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0 && self.nu > 0.0) {
            return Err(invalid(format!(
                "good-set parameters must be positive (alpha = {}, beta = {}, nu = {})",
                self.alpha, self.beta, self.nu
            )));
        }
        Ok(())
    }

    /// Additional requirement of the diffusion setting.
    pub fn validate_diffusion(&self) -> Result<()> {
        self.validate()?;
        if !(self.beta < 0.5 * self.nu * self.nu) {
            return Err(invalid(format!(
                "need beta < nu^2/2 (beta = {}, nu = {})",
                self.beta, self.nu
            )));
        }
        Ok(())
    }

    /// `1 - e^{-alpha beta / nu^2}`
    pub fn lower_bound(&self) -> f64 {
        -(-self.alpha * self.beta / (self.nu * self.nu)).exp_m1()
    }

    /// `1 - e^{-2 alpha beta / nu^2}`: the infinite-horizon survival
    /// probability of `W_t - (beta/nu) t` below `alpha/nu`.
    pub fn exact_value(&self) -> f64 {
        -(-2.0 * self.alpha * self.beta / (self.nu * self.nu)).exp_m1()
    }

    pub fn radius(&self) -> RadiusSchedule {
        RadiusSchedule::linear(self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoodSetVerdict {
    pub inside: bool,
    pub first_violation: Option<f64>,
}

/// Grid-level membership test; crossings between grid points are missed.
pub fn good_set_indicator(path: &BrownianPath, p: &GoodSetParams) -> GoodSetVerdict {
    let first_violation = path
        .times
        .iter()
        .zip(&path.values)
        .find(|(&t, &w)| p.alpha + p.beta * t - p.nu * w < 0.0)
        .map(|(&t, _)| t);
    GoodSetVerdict {
        inside: first_violation.is_none(),
        first_violation,
    }
}

/// First grid time with `nu W(t) > phi(t)`; `phi` includes the schedule's offset.
pub fn hitting_time(path: &BrownianPath, radius: &RadiusSchedule, nu: f64) -> Option<f64> {
    path.times
        .iter()
        .zip(&path.values)
        .find(|(&t, &w)| nu * w > radius.eval(t))
        .map(|(&t, _)| t)
}

/// `max_{t <= T} e^{nu W(t)}` over the grid.
pub fn path_sup_gamma_inverse(path: &BrownianPath, nu: f64, t_end: f64) -> Result<f64> {
    if t_end > path.horizon() * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "path horizon {} shorter than requested {t_end}",
            path.horizon()
        )));
    }
    Ok((nu * path.max_value_until(t_end)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityReport {
    pub estimate: f64,
    pub std_error: f64,
    /// Wilson 95% interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_paths: usize,
    pub survivors: usize,
    pub lower_bound: f64,
    pub exact_value: f64,
}

/// Wilson score interval for `k` successes out of `n` at the 95% level.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

pub fn binomial_std_error(k: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

fn survives(p: &GoodSetParams, t_end: f64, dt: f64, seed: u64, stream: u64) -> bool {
    let mut rng = path_rng(seed, stream);
    let steps = grid_steps(t_end, dt);
    let mut w = 0.0f64;
    for i in 1..=steps {
        let t = if i == steps { t_end } else { i as f64 * dt };
        let h = t - (i - 1) as f64 * dt;
        let z: f64 = rng.sample(StandardNormal);
        w += h.sqrt() * z;
        if p.alpha + p.beta * t - p.nu * w < 0.0 {
            return false;
        }
    }
    true
}

/// Number of steps of size `dt` covering `[0, T]`; the last may be shorter.
pub fn grid_steps(t_end: f64, dt: f64) -> usize {
    let raw = t_end / dt;
    let steps = if (raw - raw.round()).abs() < 1e-9 * raw.max(1.0) {
        raw.round()
    } else {
        raw.ceil()
    } as usize;
    steps.max(1)
}

/// Monte Carlo survival frequency of the good set over `[0, T]`.
///
/// Path `i` uses stream `i` of `seed`, identical to
/// `sample_path_stream(T, dt, seed, i)`.
pub fn good_set_probability(
    p: &GoodSetParams,
    t_end: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
) -> Result<ProbabilityReport> {
    p.validate()?;
    grid(t_end, dt)?;
    if n_paths < MIN_PATHS {
        return Err(Error::InsufficientSamples {
            got: n_paths,
            need: MIN_PATHS,
        });
    }
    let survivors = (0..n_paths as u64)
        .into_par_iter()
        .filter(|&i| survives(p, t_end, dt, seed, i))
        .count();
    let (ci_low, ci_high) = wilson_interval(survivors, n_paths);
    Ok(ProbabilityReport {
        estimate: survivors as f64 / n_paths as f64,
        std_error: binomial_std_error(survivors, n_paths),
        ci_low,
        ci_high,
        n_paths,
        survivors,
        lower_bound: p.lower_bound(),
        exact_value: p.exact_value(),
    })
}
