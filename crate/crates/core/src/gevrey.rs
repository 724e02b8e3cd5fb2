//! Fourier multipliers `|grad|^s`, `e^{phi |grad|^s}`, the noise transform
//! `Gamma = e^{-nu W |grad|^s}` and the Sobolev/Gevrey norms.
//!
//! Gevrey norm of order `1/s`, index `sigma`, radius `phi`:
//!
//! ```text
//! |f|^2 = sum_k (1 + e^{2 phi |k|^s} |k|^{2 sigma s}) |f_k|^2
//! ```
//!
//! The homogeneous variant drops the `1`.

use crate::error::{invalid, Error, Result};
use crate::field::FourierField;

/// Largest admissible multiplier exponent `|phi| * kmax^s`.
pub const EXPONENT_CAP: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreyParams {
    pub sigma: f64,
    pub s: f64,
    pub phi: f64,
}

impl GevreyParams {
    pub fn new(sigma: f64, s: f64, phi: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(invalid(format!("s must lie in [0, 1], got {s}")));
        }
        if !(phi >= 0.0) {
            return Err(invalid(format!("radius must be non-negative, got {phi}")));
        }
        Ok(GevreyParams { sigma, s, phi })
    }

    pub fn with_phi(self, phi: f64) -> Result<Self> {
        GevreyParams::new(self.sigma, self.s, phi)
    }

    pub fn with_sigma(self, sigma: f64) -> Result<Self> {
        GevreyParams::new(sigma, self.s, self.phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    /// `H^{sigma s}`
    Hs,
    /// `\dot H^{sigma s}`
    HsDot,
    Gevrey,
    GevreyDot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaDirection {
    Forward,
    Inverse,
}

fn ks(kmag: f64, s: f64) -> f64 {
    kmag.powf(s)
}

/// Coefficient-wise multiplication by `|k|^s`; the zero mode is left as is.
pub fn apply_frac_laplacian<F: FourierField>(f: &F, s: f64) -> Result<F> {
    if !(s >= 0.0) {
        return Err(invalid(format!(
            "fractional order must be non-negative, got {s}"
        )));
    }
    let lat = f.lattice().clone();
    Ok(f.map_modes(|i| {
        let k = lat.magnitude(i);
        if k == 0.0 {
            1.0
        } else {
            k.powf(s)
        }
    }))
}

pub fn check_exponent(phi: f64, s: f64, n: usize) -> Result<()> {
    let kmax = 2.0 * std::f64::consts::PI * n as f64 * 3f64.sqrt();
    let exponent = phi.abs() * ks(kmax, s).max(1.0);
    if exponent > EXPONENT_CAP || !exponent.is_finite() {
        return Err(Error::ExponentCap {
            exponent,
            cap: EXPONENT_CAP,
        });
    }
    Ok(())
}

/// Coefficient-wise multiplication by `e^{phi |k|^s}`. `phi` may be negative.
///
/// With `s = 0` every coefficient, the zero mode included, is scaled by `e^phi`.
pub fn apply_exp_multiplier<F: FourierField>(f: &F, phi: f64, s: f64) -> Result<F> {
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid(format!("s must lie in [0, 1], got {s}")));
    }
    check_exponent(phi, s, f.truncation())?;
    if phi == 0.0 {
        return Ok(f.clone());
    }
    let lat = f.lattice().clone();
    Ok(f.map_modes(|i| (phi * ks(lat.magnitude(i), s)).exp()))
}

/// `Gamma f = e^{-nu W |grad|^s} f` (forward) or its inverse.
pub fn gamma_apply<F: FourierField>(
    f: &F,
    nu: f64,
    w: f64,
    s: f64,
    direction: GammaDirection,
) -> Result<F> {
    let phi = match direction {
        GammaDirection::Forward => -nu * w,
        GammaDirection::Inverse => nu * w,
    };
    apply_exp_multiplier(f, phi, s)
}

/// `sqrt(sum_i a_i^2)` from logarithms `ln a_i`, accumulated in descending
/// `|k|` order with compensated summation after rescaling by the largest term.
fn norm_from_logs(logs: &[f64]) -> f64 {
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &l in logs {
        let t = (2.0 * (l - top)).exp();
        let y = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - y) + t;
        } else {
            comp += (t - y) + sum;
        }
        sum = y;
    }
    top.exp() * (sum + comp).sqrt()
}

/// Norm of `f` of the requested kind. Gevrey weights are evaluated in log
/// space so that the result only overflows when the norm itself does.
pub fn norm<F: FourierField>(f: &F, kind: NormKind, params: &GevreyParams) -> Result<f64> {
    let lat = f.lattice().clone();
    let exps = params.sigma * params.s;
    if matches!(kind, NormKind::Gevrey | NormKind::GevreyDot) {
        check_exponent(params.phi, params.s, f.truncation())?;
    }
    let mut logs = Vec::with_capacity(2 * lat.len());
    for &i in lat.by_magnitude_desc() {
        let amp = f
            .components()
            .iter()
            .fold(0.0f64, |a, c| a.hypot(c[i].norm()));
        if amp == 0.0 {
            continue;
        }
        let la = amp.ln();
        let k = lat.magnitude(i);
        let lk = if k > 0.0 { k.ln() } else { f64::NEG_INFINITY };
        match kind {
            NormKind::L2 => logs.push(la),
            NormKind::Hs | NormKind::HsDot => {
                if kind == NormKind::Hs {
                    logs.push(la);
                }
                if k > 0.0 {
                    logs.push(la + exps * lk);
                } else if exps == 0.0 {
                    logs.push(la);
                }
            }
            NormKind::Gevrey | NormKind::GevreyDot => {
                if kind == NormKind::Gevrey {
                    logs.push(la);
                }
                if k > 0.0 {
                    logs.push(la + params.phi * ks(k, params.s) + exps * lk);
                } else if exps == 0.0 {
                    logs.push(la + params.phi * ks(k, params.s));
                }
            }
        }
    }
    Ok(norm_from_logs(&logs))
}

pub fn gevrey_norm<F: FourierField>(f: &F, sigma: f64, s: f64, phi: f64) -> Result<f64> {
    norm(f, NormKind::Gevrey, &GevreyParams::new(sigma, s, phi)?)
}

pub fn gevrey_dot_norm<F: FourierField>(f: &F, sigma: f64, s: f64, phi: f64) -> Result<f64> {
    norm(f, NormKind::GevreyDot, &GevreyParams::new(sigma, s, phi)?)
}

/// Applies `e^{phi A^s} A^r` (with `A = |grad|`) in one pass. For `r > 0`
/// the zero mode is annihilated.
pub fn weighted<F: FourierField>(f: &F, phi: f64, s: f64, r: f64) -> Result<F> {
    check_exponent(phi, s, f.truncation())?;
    let lat = f.lattice().clone();
    let zero_factor = if r == 0.0 {
        (phi * 0f64.powf(s)).exp()
    } else {
        0.0
    };
    Ok(f.map_modes(|i| {
        let k = lat.magnitude(i);
        if k == 0.0 {
            zero_factor
        } else {
            (phi * ks(k, s) + r * k.ln()).exp()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Parity, SpectralScalar, SpectralVelocity};
    use crate::lattice::WaveIndex;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn two_cos() -> SpectralScalar {
        let mut f = SpectralScalar::zeros(2, Parity::Even);
        f.set(WaveIndex::new(1, 0, 0), Complex64::new(1.0, 0.0));
        f.set(WaveIndex::new(-1, 0, 0), Complex64::new(1.0, 0.0));
        f
    }

    #[test]
    fn gevrey_norm_of_two_cos() {
        let f = two_cos();
        let g = gevrey_norm(&f, 1.0, 1.0, 0.0).unwrap();
        assert!((g - (2.0 * (1.0 + 4.0 * PI * PI)).sqrt()).abs() < 1e-13);
        let l2 = norm(&f, NormKind::L2, &GevreyParams::new(1.0, 1.0, 0.0).unwrap()).unwrap();
        assert!((l2 - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let f = SpectralVelocity::zeros(2);
        let p = GevreyParams::new(1.5, 0.9, 0.3).unwrap();
        for kind in [
            NormKind::L2,
            NormKind::Hs,
            NormKind::HsDot,
            NormKind::Gevrey,
            NormKind::GevreyDot,
        ] {
            assert_eq!(norm(&f, kind, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn single_mode_multipliers() {
        let f = two_cos();
        let a = apply_frac_laplacian(&f, 1.0).unwrap();
        assert!((a.get(WaveIndex::new(1, 0, 0)).unwrap().re - 2.0 * PI).abs() < 1e-14);
        let e = apply_exp_multiplier(&f, 0.1, 1.0).unwrap();
        assert!((e.get(WaveIndex::new(-1, 0, 0)).unwrap().re - (0.2 * PI).exp()).abs() < 1e-14);
        let id = apply_exp_multiplier(&f, 0.0, 0.5).unwrap();
        assert_eq!(id.sub(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn gamma_scalar_case_halves() {
        let f = two_cos();
        let g = gamma_apply(&f, 1.0, 2f64.ln(), 0.0, GammaDirection::Forward).unwrap();
        assert!((g.get(WaveIndex::new(1, 0, 0)).unwrap().re - 0.5).abs() < 1e-15);
        let w0 = gamma_apply(&f, 3.0, 0.0, 1.0, GammaDirection::Forward).unwrap();
        assert_eq!(w0.sub(&f).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn exponent_cap_is_enforced() {
        let f = two_cos();
        // kmax = 2 pi 2 sqrt 3 ~ 21.77
        assert!(matches!(
            apply_exp_multiplier(&f, 40.0, 1.0),
            Err(Error::ExponentCap { .. })
        ));
        assert!(matches!(
            apply_exp_multiplier(&f, -40.0, 1.0),
            Err(Error::ExponentCap { .. })
        ));
        assert!(apply_exp_multiplier(&f, 30.0, 1.0).is_ok());
        assert!(gevrey_norm(&f, 1.0, 1.0, 40.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(GevreyParams::new(0.0, 0.5, 0.0).is_err());
        assert!(GevreyParams::new(1.0, 1.5, 0.0).is_err());
        assert!(GevreyParams::new(1.0, 0.5, -0.1).is_err());
        assert!(apply_frac_laplacian(&two_cos(), -1.0).is_err());
    }

    #[test]
    fn large_weights_do_not_overflow_prematurely() {
        let mut f = SpectralScalar::zeros(8, Parity::Even);
        f.set(WaveIndex::new(8, 8, 8), Complex64::new(1e-300, 0.0));
        // weight e^{8 * 87} * 87^2 ~ e^{705}: norm ~ e^{705} * 1e-300 is finite
        let g = gevrey_dot_norm(&f, 1.0, 1.0, 8.0).unwrap();
        let expect = (8.0 * 2.0 * PI * 8.0 * 3f64.sqrt() + (2.0 * PI * 8.0 * 3f64.sqrt()).ln()
            - 300.0 * 10f64.ln())
        .exp();
        assert!(((g - expect) / expect).abs() < 1e-10, "{g} vs {expect}");
    }
}
