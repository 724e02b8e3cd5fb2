//! Moving Gevrey/analytic radii.

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusKind {
    /// `phi(t) = alpha + beta t`
    Linear {
        alpha: f64,
        beta: f64,
    },
    /// `phi(t) = phi0 - 4 C (e^alpha |V0| + 1) (1 - e^{-(nu^2/2 - beta) t}) / (nu^2 - 2 beta)`
    Damping {
        phi0: f64,
        alpha: f64,
        beta: f64,
        nu: f64,
        c_sigma: f64,
        v0_norm: f64,
    },
    Constant {
        phi: f64,
    },
}

/// A radius `phi(t)` plus a uniform offset `eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusSchedule {
    pub kind: RadiusKind,
    pub eta: f64,
}

impl RadiusSchedule {
    pub fn linear(alpha: f64, beta: f64) -> Self {
        RadiusSchedule {
            kind: RadiusKind::Linear { alpha, beta },
            eta: 0.0,
        }
    }

    pub fn constant(phi: f64) -> Self {
        RadiusSchedule {
            kind: RadiusKind::Constant { phi },
            eta: 0.0,
        }
    }

    pub fn damping(phi0: f64, alpha: f64, beta: f64, nu: f64, c_sigma: f64, v0_norm: f64) -> Self {
        RadiusSchedule {
            kind: RadiusKind::Damping {
                phi0,
                alpha,
                beta,
                nu,
                c_sigma,
                v0_norm,
            },
            eta: 0.0,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) {
            return Err(invalid(format!(
                "eta must be non-negative, got {}",
                self.eta
            )));
        }
        match self.kind {
            RadiusKind::Linear { alpha, beta } => {
                if !(alpha > 0.0) || !(beta >= 0.0) {
                    return Err(invalid(format!(
                        "linear radius needs alpha > 0, beta >= 0 (got {alpha}, {beta})"
                    )));
                }
            }
            RadiusKind::Damping {
                phi0,
                alpha,
                beta,
                nu,
                c_sigma,
                v0_norm,
            } => {
                if !(phi0 > 0.0) || !(c_sigma >= 0.0) || !(v0_norm >= 0.0) || !(alpha >= 0.0) {
                    return Err(invalid(
                        "damping radius needs phi0 > 0 and non-negative alpha, C_sigma, |V0|",
                    ));
                }
                if !(nu * nu - 2.0 * beta > 0.0) {
                    return Err(invalid(format!(
                        "damping radius needs beta < nu^2/2 (beta = {beta}, nu = {nu})"
                    )));
                }
            }
            RadiusKind::Constant { phi } => {
                if !(phi >= 0.0) {
                    return Err(invalid(format!(
                        "constant radius must be non-negative, got {phi}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `phi(t)` without the offset.
    pub fn base(&self, t: f64) -> f64 {
        match self.kind {
            RadiusKind::Linear { alpha, beta } => alpha + beta * t,
            RadiusKind::Damping {
                phi0,
                alpha,
                beta,
                nu,
                c_sigma,
                v0_norm,
            } => {
                let gap = nu * nu - 2.0 * beta;
                let drop = 4.0 * c_sigma / gap * (alpha.exp() * v0_norm + 1.0);
                phi0 - drop * -(-(0.5 * gap) * t).exp_m1()
            }
            RadiusKind::Constant { phi } => phi,
        }
    }

    /// `phi(t) + eta`
    pub fn eval(&self, t: f64) -> f64 {
        self.base(t) + self.eta
    }

    /// `lim_{t -> inf} phi(t) + eta`, when finite.
    pub fn limit(&self) -> Option<f64> {
        match self.kind {
            RadiusKind::Linear { beta, .. } if beta > 0.0 => None,
            _ => Some(self.eval(f64::INFINITY)),
        }
    }
}
