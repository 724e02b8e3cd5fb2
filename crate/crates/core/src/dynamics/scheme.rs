//! Integrating-factor (Lawson) Runge–Kutta schemes for `dU/dt = -L U + N(U)`
//! with `L` diagonal in Fourier space. The linear part is propagated exactly.

use std::sync::{Arc, OnceLock};

use crate::error::Result;
use crate::field::{FourierField, SpectralVelocity};
use crate::registry::{Named, Registry};

/// Exact linear propagator `E_tau = e^{-tau L}`.
#[derive(Debug, Clone)]
pub struct Propagator {
    rates: Vec<f64>,
}

impl Propagator {
    pub fn new(rates: Vec<f64>) -> Self {
        Propagator { rates }
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn apply(&self, u: &SpectralVelocity, tau: f64) -> SpectralVelocity {
        if tau == 0.0 {
            return u.clone();
        }
        u.map_modes(|i| (-self.rates[i] * tau).exp())
    }
}

pub type Rhs<'a> = dyn FnMut(&SpectralVelocity) -> Result<SpectralVelocity> + 'a;

pub trait Scheme: Named + Send + Sync {
    fn order(&self) -> usize;

    /// Advances `u` by `h`; `rhs` is the nonlinear part evaluated with the
    /// noise frozen for the whole step.
    fn step(
        &self,
        u: &SpectralVelocity,
        h: f64,
        prop: &Propagator,
        rhs: &mut Rhs<'_>,
    ) -> Result<SpectralVelocity>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct LawsonEuler;

impl Named for LawsonEuler {
    fn name(&self) -> &'static str {
        "euler"
    }
}

impl Scheme for LawsonEuler {
    fn order(&self) -> usize {
        1
    }

    fn step(
        &self,
        u: &SpectralVelocity,
        h: f64,
        prop: &Propagator,
        rhs: &mut Rhs<'_>,
    ) -> Result<SpectralVelocity> {
        let a = rhs(u)?;
        Ok(prop.apply(&u.axpy(h, &a)?, h))
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct LawsonRk2;

impl Named for LawsonRk2 {
    fn name(&self) -> &'static str {
        "rk2"
    }
}

impl Scheme for LawsonRk2 {
    fn order(&self) -> usize {
        2
    }

    fn step(
        &self,
        u: &SpectralVelocity,
        h: f64,
        prop: &Propagator,
        rhs: &mut Rhs<'_>,
    ) -> Result<SpectralVelocity> {
        let a = rhs(u)?;
        let eu = prop.apply(u, h);
        let ea = prop.apply(&a, h);
        let b = rhs(&eu.axpy(h, &ea)?)?;
        eu.axpy(0.5 * h, &ea.axpy(1.0, &b)?)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct LawsonRk4;

impl Named for LawsonRk4 {
    fn name(&self) -> &'static str {
        "rk4"
    }
}

impl Scheme for LawsonRk4 {
    fn order(&self) -> usize {
        4
    }

    fn step(
        &self,
        u: &SpectralVelocity,
        h: f64,
        prop: &Propagator,
        rhs: &mut Rhs<'_>,
    ) -> Result<SpectralVelocity> {
        let half = 0.5 * h;
        let a = rhs(u)?;
        let eu_half = prop.apply(u, half);
        let ea_half = prop.apply(&a, half);
        let b = rhs(&eu_half.axpy(half, &ea_half)?)?;
        let c = rhs(&eu_half.axpy(half, &b)?)?;
        let eu = prop.apply(u, h);
        let ec_half = prop.apply(&c, half);
        let d = rhs(&eu.axpy(h, &ec_half)?)?;
        let mid = prop.apply(&b.axpy(1.0, &c)?, half);
        let sum = prop.apply(&a, h).axpy(2.0, &mid)?.axpy(1.0, &d)?;
        eu.axpy(h / 6.0, &sum)
    }
}

pub fn registry() -> &'static Registry<dyn Scheme> {
    static REG: OnceLock<Registry<dyn Scheme>> = OnceLock::new();
    REG.get_or_init(|| {
        let items: [Arc<dyn Scheme>; 3] = [
            Arc::new(LawsonEuler),
            Arc::new(LawsonRk2),
            Arc::new(LawsonRk4),
        ];
        items
            .into_iter()
            .fold(Registry::new("time-stepping scheme"), Registry::with)
    })
}
