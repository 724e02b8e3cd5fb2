//! Noise models: how the transformed equation `dU/dt = -L U + N_W(U)` looks
//! for each way the multiplicative noise enters.
//!
//! * `diffusion`: `L = nu^2 |k|^{2s} / 2`, `N_W(U) = -P Gamma Q(Gamma^{-1} U, Gamma^{-1} U)`
//! * `damping`: `L = nu^2 / 2`, `N_W(U) = -e^{nu W} P Q(U, U)`
//! * `none`: `L = 0`, `N(U) = -P Q(U, U)`

use std::sync::{Arc, OnceLock};

use super::config::SimConfig;
use super::radius::RadiusSchedule;
use super::run::Status;
use crate::analysis::constants::estimate_c_sigma;
use crate::error::{invalid, Error, Result};
use crate::field::{FourierField, SpectralVelocity};
use crate::gevrey::{gamma_apply, gevrey_norm, GammaDirection};
use crate::registry::{Named, Registry};
use crate::spectral::{hydrostatic_leray, nonlinear_q_with, ProductBackend};

/// Noise state frozen over one time step.
#[derive(Clone, Copy)]
pub struct Frozen<'a> {
    pub nu: f64,
    pub s: f64,
    pub w: f64,
    pub backend: &'a dyn ProductBackend,
}

pub trait NoiseModel: Named + Send + Sync {
    fn validate(&self, cfg: &SimConfig) -> Result<()>;

    /// Linear decay rate at wavenumber magnitude `k`.
    fn decay(&self, cfg: &SimConfig, k: f64) -> f64;

    /// Nonlinear part of the right-hand side, projected.
    fn nonlinear(&self, u: &SpectralVelocity, frozen: &Frozen<'_>) -> Result<SpectralVelocity>;

    /// Differentiability index of the tracked Gevrey norm.
    fn norm_s(&self, cfg: &SimConfig) -> f64;

    fn radius(&self, cfg: &SimConfig, u0: &SpectralVelocity) -> Result<RadiusSchedule>;

    /// Terminal condition checked at the left end of every step.
    fn exit(&self, cfg: &SimConfig, radius: &RadiusSchedule, t: f64, w: f64) -> Option<Status>;

    /// `V = Gamma^{-1} U`.
    fn recover_v(
        &self,
        cfg: &SimConfig,
        radius: &RadiusSchedule,
        u: &SpectralVelocity,
        t: f64,
        w: f64,
    ) -> Result<SpectralVelocity>;

    /// Radius at which the recovered `V` is measured.
    fn v_radius(&self, cfg: &SimConfig, radius: &RadiusSchedule, t: f64) -> f64;

    /// Exponent `nu |W| kmax^s` of the noise multiplier itself.
    fn multiplier_exponent(&self, cfg: &SimConfig, kmax: f64, w_abs: f64) -> f64;
}

fn projected_q(u: &SpectralVelocity, backend: &dyn ProductBackend) -> Result<SpectralVelocity> {
    Ok(hydrostatic_leray(&nonlinear_q_with(backend, u, u)?))
}

fn check_common(cfg: &SimConfig) -> Result<()> {
    if !(cfg.nu > 0.0) {
        return Err(invalid(format!(
            "noise intensity must be positive, got {}",
            cfg.nu
        )));
    }
    if !(cfg.alpha > 0.0) || !(cfg.beta > 0.0) {
        return Err(invalid(format!(
            "alpha and beta must be positive (got {}, {})",
            cfg.alpha, cfg.beta
        )));
    }
    if !(cfg.beta < 0.5 * cfg.nu * cfg.nu) {
        return Err(invalid(format!(
            "need beta < nu^2/2 (beta = {}, nu^2/2 = {})",
            cfg.beta,
            0.5 * cfg.nu * cfg.nu
        )));
    }
    Ok(())
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Diffusion;

impl Named for Diffusion {
    fn name(&self) -> &'static str {
        "diffusion"
    }
}

impl NoiseModel for Diffusion {
    fn validate(&self, cfg: &SimConfig) -> Result<()> {
        if !(cfg.s > 0.8 && cfg.s <= 1.0) {
            return Err(invalid(format!(
                "diffusion needs s in (4/5, 1], got {}",
                cfg.s
            )));
        }
        let lo = 8.0 / (5.0 * cfg.s);
        if !(cfg.sigma > lo && cfg.sigma < 2.0) {
            return Err(invalid(format!(
                "diffusion needs sigma in ({lo:.6}, 2), got {}",
                cfg.sigma
            )));
        }
        check_common(cfg)
    }

    fn decay(&self, cfg: &SimConfig, k: f64) -> f64 {
        if k == 0.0 {
            0.0
        } else {
            0.5 * cfg.nu * cfg.nu * k.powf(2.0 * cfg.s)
        }
    }

    fn nonlinear(&self, u: &SpectralVelocity, fz: &Frozen<'_>) -> Result<SpectralVelocity> {
        let v = gamma_apply(u, fz.nu, fz.w, fz.s, GammaDirection::Inverse)?;
        let pq = projected_q(&v, fz.backend)?;
        Ok(gamma_apply(&pq, fz.nu, fz.w, fz.s, GammaDirection::Forward)?.scaled(-1.0))
    }

    fn norm_s(&self, cfg: &SimConfig) -> f64 {
        cfg.s
    }

    fn radius(&self, cfg: &SimConfig, _u0: &SpectralVelocity) -> Result<RadiusSchedule> {
        Ok(RadiusSchedule::linear(cfg.alpha, cfg.beta).with_eta(cfg.eta_value()))
    }

    fn exit(&self, cfg: &SimConfig, radius: &RadiusSchedule, t: f64, w: f64) -> Option<Status> {
        (cfg.nu * w > radius.base(t)).then_some(Status::GoodsetExit)
    }

    fn recover_v(
        &self,
        cfg: &SimConfig,
        radius: &RadiusSchedule,
        u: &SpectralVelocity,
        t: f64,
        w: f64,
    ) -> Result<SpectralVelocity> {
        let (nu_w, phi) = (cfg.nu * w, radius.eval(t));
        if nu_w > phi {
            return Err(Error::RadiusViolation { nu_w, radius: phi });
        }
        gamma_apply(u, cfg.nu, w, cfg.s, GammaDirection::Inverse)
    }

    fn v_radius(&self, cfg: &SimConfig, _radius: &RadiusSchedule, _t: f64) -> f64 {
        cfg.eta_value()
    }

    fn multiplier_exponent(&self, cfg: &SimConfig, kmax: f64, w_abs: f64) -> f64 {
        cfg.nu * w_abs * kmax.powf(cfg.s)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Damping;

impl Named for Damping {
    fn name(&self) -> &'static str {
        "damping"
    }
}

impl NoiseModel for Damping {
    fn validate(&self, cfg: &SimConfig) -> Result<()> {
        if cfg.s != 0.0 {
            return Err(invalid(format!("damping needs s = 0, got {}", cfg.s)));
        }
        if !(cfg.sigma > 2.5) {
            return Err(invalid(format!(
                "damping needs sigma > 5/2, got {}",
                cfg.sigma
            )));
        }
        if !(cfg.phi0 > 0.0) {
            return Err(invalid(format!("damping needs phi0 > 0, got {}", cfg.phi0)));
        }
        check_common(cfg)
    }

    fn decay(&self, cfg: &SimConfig, _k: f64) -> f64 {
        0.5 * cfg.nu * cfg.nu
    }

    fn nonlinear(&self, u: &SpectralVelocity, fz: &Frozen<'_>) -> Result<SpectralVelocity> {
        Ok(projected_q(u, fz.backend)?.scaled(-(fz.nu * fz.w).exp()))
    }

    fn norm_s(&self, _cfg: &SimConfig) -> f64 {
        1.0
    }

    fn radius(&self, cfg: &SimConfig, u0: &SpectralVelocity) -> Result<RadiusSchedule> {
        let c_sigma = match cfg.c_sigma {
            Some(c) => c,
            None => estimate_c_sigma(cfg.sigma, cfg.n.min(8), 200, cfg.seed)?.max,
        };
        let v0 = gevrey_norm(u0, cfg.sigma, 1.0, cfg.phi0)?;
        Ok(
            RadiusSchedule::damping(cfg.phi0, cfg.alpha, cfg.beta, cfg.nu, c_sigma, v0)
                .with_eta(cfg.eta_value()),
        )
    }

    fn exit(&self, _cfg: &SimConfig, radius: &RadiusSchedule, t: f64, _w: f64) -> Option<Status> {
        (radius.eval(t) <= 0.0).then_some(Status::RadiusExhausted)
    }

    fn recover_v(
        &self,
        cfg: &SimConfig,
        _radius: &RadiusSchedule,
        u: &SpectralVelocity,
        _t: f64,
        w: f64,
    ) -> Result<SpectralVelocity> {
        gamma_apply(u, cfg.nu, w, 0.0, GammaDirection::Inverse)
    }

    fn v_radius(&self, _cfg: &SimConfig, radius: &RadiusSchedule, t: f64) -> f64 {
        radius.eval(t).max(0.0)
    }

    // e^{nu W} multiplies the whole product, so it leaves relative round-off alone.
    fn multiplier_exponent(&self, _cfg: &SimConfig, _kmax: f64, _w_abs: f64) -> f64 {
        0.0
    }
}

/// Deterministic inviscid baseline.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoNoise;

impl Named for NoNoise {
    fn name(&self) -> &'static str {
        "none"
    }
}

impl NoiseModel for NoNoise {
    fn validate(&self, cfg: &SimConfig) -> Result<()> {
        if cfg.nu != 0.0 {
            return Err(invalid(format!(
                "the deterministic baseline needs nu = 0, got {}",
                cfg.nu
            )));
        }
        if !(cfg.sigma > 0.0) || !(0.0..=1.0).contains(&cfg.s) {
            return Err(invalid("need sigma > 0 and s in [0, 1]"));
        }
        if !(cfg.phi0 >= 0.0) {
            return Err(invalid(format!(
                "phi0 must be non-negative, got {}",
                cfg.phi0
            )));
        }
        Ok(())
    }

    fn decay(&self, _cfg: &SimConfig, _k: f64) -> f64 {
        0.0
    }

    fn nonlinear(&self, u: &SpectralVelocity, fz: &Frozen<'_>) -> Result<SpectralVelocity> {
        Ok(projected_q(u, fz.backend)?.scaled(-1.0))
    }

    fn norm_s(&self, cfg: &SimConfig) -> f64 {
        if cfg.s > 0.0 {
            cfg.s
        } else {
            1.0
        }
    }

    fn radius(&self, cfg: &SimConfig, _u0: &SpectralVelocity) -> Result<RadiusSchedule> {
        Ok(RadiusSchedule::constant(cfg.phi0).with_eta(cfg.eta_value()))
    }

    fn exit(&self, _cfg: &SimConfig, _radius: &RadiusSchedule, _t: f64, _w: f64) -> Option<Status> {
        None
    }

    fn recover_v(
        &self,
        _cfg: &SimConfig,
        _radius: &RadiusSchedule,
        u: &SpectralVelocity,
        _t: f64,
        _w: f64,
    ) -> Result<SpectralVelocity> {
        Ok(u.clone())
    }

    fn v_radius(&self, _cfg: &SimConfig, radius: &RadiusSchedule, t: f64) -> f64 {
        radius.eval(t)
    }

    fn multiplier_exponent(&self, _cfg: &SimConfig, _kmax: f64, _w_abs: f64) -> f64 {
        0.0
    }
}

pub fn registry() -> &'static Registry<dyn NoiseModel> {
    static REG: OnceLock<Registry<dyn NoiseModel>> = OnceLock::new();
    REG.get_or_init(|| {
        let items: [Arc<dyn NoiseModel>; 3] =
            [Arc::new(Diffusion), Arc::new(Damping), Arc::new(NoNoise)];
        items
            .into_iter()
            .fold(Registry::new("noise model"), Registry::with)
    })
}
