use std::sync::Arc;

use super::noise::{self, NoiseModel};
use super::radius::RadiusSchedule;
use super::scheme::{self, Scheme};
use crate::error::{invalid, Result};
use crate::field::SpectralVelocity;
use crate::gevrey::{norm, GevreyParams, NormKind};
use crate::spectral::product::{self, ProductBackend};
use crate::stochastic::GoodSetParams;

/// Default blowup threshold, relative to the initial Gevrey norm.
pub const DEFAULT_BLOWUP_FACTOR: f64 = 1e8;

/// Full description of one run. Strategy fields (`noise`, `scheme`,
/// `backend`) are registry names.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub noise: String,
    pub scheme: String,
    /// `fft`, `direct` or `auto`.
    pub backend: String,
    pub nu: f64,
    pub s: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Radius offset; `None` means `alpha / 10` for diffusion and 0 otherwise.
    pub eta: Option<f64>,
    /// Initial radius for the damping and deterministic runs.
    pub phi0: f64,
    pub c_sigma: Option<f64>,
    pub c_star: Option<f64>,
    /// Explicit radius, replacing the one derived from the noise model.
    pub radius: Option<RadiusSchedule>,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub blowup_factor: f64,
    pub seed: u64,
    /// Test hook: drop the nonlinear term.
    pub linear_only: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            noise: "diffusion".into(),
            scheme: "rk4".into(),
            backend: "auto".into(),
            nu: 2.0,
            s: 1.0,
            sigma: 1.9,
            alpha: 0.2,
            beta: 0.5,
            eta: None,
            phi0: 0.2,
            c_sigma: None,
            c_star: None,
            radius: None,
            n: 16,
            dt: 1e-3,
            t_end: 1.0,
            blowup_factor: DEFAULT_BLOWUP_FACTOR,
            seed: 0,
            linear_only: false,
        }
    }
}

impl SimConfig {
    pub fn diffusion() -> Self {
        SimConfig::default()
    }

    pub fn damping() -> Self {
        SimConfig {
            noise: "damping".into(),
            s: 0.0,
            sigma: 2.6,
            phi0: 0.2,
            ..SimConfig::default()
        }
    }

    pub fn deterministic() -> Self {
        SimConfig {
            noise: "none".into(),
            nu: 0.0,
            s: 1.0,
            sigma: 1.9,
            ..SimConfig::default()
        }
    }

    pub fn noise_model(&self) -> Result<Arc<dyn NoiseModel>> {
        noise::registry().get(&self.noise)
    }

    pub fn scheme_impl(&self) -> Result<Arc<dyn Scheme>> {
        scheme::registry().get(&self.scheme)
    }

    pub fn eta_value(&self) -> f64 {
        self.eta.unwrap_or(if self.noise == "diffusion" {
            self.alpha / 10.0
        } else {
            0.0
        })
    }

    pub fn good_set(&self) -> GoodSetParams {
        GoodSetParams {
            alpha: self.alpha,
            beta: self.beta,
            nu: self.nu,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("truncation N must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(invalid(format!(
                "horizon must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(invalid(format!(
                "blowup factor must exceed 1, got {}",
                self.blowup_factor
            )));
        }
        if !(self.eta_value() >= 0.0) {
            return Err(invalid(format!(
                "eta must be non-negative, got {}",
                self.eta_value()
            )));
        }
        if self.backend != "auto" {
            product::registry().get(&self.backend)?;
        }
        self.scheme_impl()?;
        self.noise_model()?.validate(self)?;
        if let Some(r) = &self.radius {
            r.validate()?;
        }
        Ok(())
    }

    /// Differentiability index of the tracked Gevrey norm.
    pub fn norm_s(&self) -> Result<f64> {
        Ok(self.noise_model()?.norm_s(self))
    }

    /// Radius schedule for a run started from `u0`.
    pub fn radius_for(&self, u0: &SpectralVelocity) -> Result<RadiusSchedule> {
        if let Some(r) = self.radius {
            return Ok(r);
        }
        self.noise_model()?.radius(self, u0)
    }

    /// `|f|_{G^{sigma, s_norm}_{phi}}`
    pub fn gevrey_norm(&self, f: &SpectralVelocity, phi: f64) -> Result<f64> {
        norm(
            f,
            NormKind::Gevrey,
            &GevreyParams::new(self.sigma, self.norm_s()?, phi)?,
        )
    }

    /// Product backend; `auto` picks `direct` when `weight_exponent` is large.
    pub fn backend_for(&self, weight_exponent: f64) -> Result<Arc<dyn ProductBackend>> {
        if self.backend == "auto" {
            Ok(product::auto_select(weight_exponent))
        } else {
            product::registry().get(&self.backend)
        }
    }
}
