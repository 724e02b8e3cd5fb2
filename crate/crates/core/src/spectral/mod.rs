//! Constraint projections, the hydrostatic Leray projection, the diagnostic
//! vertical velocity and the transport nonlinearity `Q(U, V) = U . grad_h V + w(U) dz V`.

pub mod fft;
pub mod product;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{check_same, FourierField, Parity, SpectralScalar, SpectralVelocity};
use crate::lattice::Lattice;
pub use product::ProductBackend;

/// Relative tolerance on the barotropic divergence accepted by [`vertical_velocity`].
pub const INCOMPRESSIBILITY_TOLERANCE: f64 = 1e-8;

/// Orthogonal (coefficient-wise `L^2`) projection onto fields that are real,
/// mean-free, even in `z` and horizontally divergence-free in their `z`-average.
///
/// The four constraint sets are subspaces whose projections commute, so the
/// composition is the projection onto their intersection.
pub fn project_constraints(f: &SpectralVelocity) -> SpectralVelocity {
    let lat = f.lattice().clone();
    let mut out = SpectralVelocity::zeros_on(lat.clone());
    let mut done = vec![false; lat.len()];
    for i in 0..lat.len() {
        if done[i] {
            continue;
        }
        let ni = lat.neg_index(i);
        let zi = lat.zflip_index(i);
        let nzi = lat.neg_index(zi);
        for (src, dst) in f.components().iter().zip(out.components_mut().iter_mut()) {
            let avg = (src[i] + src[ni].conj() + src[zi] + src[nzi].conj()) * 0.25;
            dst[i] = avg;
            dst[zi] = avg;
            dst[ni] = avg.conj();
            dst[nzi] = avg.conj();
        }
        for j in [i, ni, zi, nzi] {
            done[j] = true;
        }
    }
    let z = lat.zero_index();
    for comp in out.components_mut() {
        comp[z] = Complex64::default();
    }
    apply_barotropic_leray(&mut out);
    out
}

/// Barotropic (`m3 = 0`, the `z`-average) and baroclinic parts; they sum to `f`.
pub fn split_barotropic(f: &SpectralVelocity) -> (SpectralVelocity, SpectralVelocity) {
    let lat = f.lattice().clone();
    let mut bar = f.clone();
    let mut tilde = f.clone();
    for i in 0..lat.len() {
        let target = if lat.mode(i).0[2] == 0 {
            &mut tilde
        } else {
            &mut bar
        };
        for comp in target.components_mut() {
            comp[i] = Complex64::default();
        }
    }
    (bar, tilde)
}

fn apply_barotropic_leray(f: &mut SpectralVelocity) {
    let lat = f.lattice().clone();
    let [u1, u2] = f.components_mut() else {
        unreachable!()
    };
    for i in 0..lat.len() {
        let m = lat.mode(i).0;
        if m[2] != 0 || (m[0] == 0 && m[1] == 0) {
            continue;
        }
        let k = lat.wavevector(i);
        let k2 = k[0] * k[0] + k[1] * k[1];
        let d = (u1[i] * k[0] + u2[i] * k[1]) / k2;
        u1[i] -= d * k[0];
        u2[i] -= d * k[1];
    }
}

/// Two-dimensional Leray projection of a barotropic field, mode by mode:
/// `u -> u - k'(k' . u) / |k'|^2`. Modes with `m3 != 0` are left untouched.
pub fn leray_h(g: &SpectralVelocity) -> SpectralVelocity {
    let mut out = g.clone();
    apply_barotropic_leray(&mut out);
    out
}

/// Hydrostatic Leray projection `P f = P_h(bar f) + tilde f`.
pub fn hydrostatic_leray(f: &SpectralVelocity) -> SpectralVelocity {
    leray_h(f)
}

/// `sqrt(sum_{m3=0} |k' . u|^2 / |k'|^2)`.
pub fn barotropic_divergence(v: &SpectralVelocity) -> f64 {
    let lat = v.lattice();
    let mut acc = 0.0;
    for i in 0..lat.len() {
        let m = lat.mode(i).0;
        if m[2] != 0 || (m[0] == 0 && m[1] == 0) {
            continue;
        }
        let k = lat.wavevector(i);
        let d = v.u1()[i] * k[0] + v.u2()[i] * k[1];
        acc += d.norm_sqr() / (k[0] * k[0] + k[1] * k[1]);
    }
    acc.sqrt()
}

/// Horizontal divergence `grad_h . V` as an even scalar.
pub fn divergence_h(v: &SpectralVelocity) -> SpectralScalar {
    let lat = v.lattice().clone();
    let coeffs = (0..lat.len())
        .map(|i| {
            let k = lat.wavevector(i);
            let d = v.u1()[i] * k[0] + v.u2()[i] * k[1];
            Complex64::new(-d.im, d.re)
        })
        .collect();
    SpectralScalar::from_coeffs(lat, coeffs, Parity::Even).expect("lattice-sized")
}

/// Vertical derivative of a scalar; flips the parity tag.
pub fn dz(f: &SpectralScalar) -> SpectralScalar {
    let lat = f.lattice().clone();
    let coeffs = (0..lat.len())
        .map(|i| {
            let c = f.coeffs()[i] * lat.wavevector(i)[2];
            Complex64::new(-c.im, c.re)
        })
        .collect();
    let parity = match f.parity() {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
    };
    SpectralScalar::from_coeffs(lat, coeffs, parity).expect("lattice-sized")
}

/// `w(V) = -int_0^z grad_h . V`, evaluated as the exact antiderivative on each
/// mode: `w_m = -(k' . V_m) / k3` for `m3 != 0` and `w_m = 0` on `m3 = 0`.
///
/// The `m3 = 0` modes of `grad_h . V` must vanish for `w` to be periodic; an
/// input violating this beyond [`INCOMPRESSIBILITY_TOLERANCE`] is rejected.
pub fn vertical_velocity(v: &SpectralVelocity) -> Result<SpectralScalar> {
    let residual = barotropic_divergence(v);
    let tolerance = INCOMPRESSIBILITY_TOLERANCE * v.l2_norm();
    if residual > tolerance {
        return Err(Error::Incompressibility {
            residual,
            tolerance,
        });
    }
    Ok(vertical_velocity_unchecked(v))
}

pub(crate) fn vertical_velocity_unchecked(v: &SpectralVelocity) -> SpectralScalar {
    let lat = v.lattice().clone();
    let coeffs = (0..lat.len())
        .map(|i| {
            let k = lat.wavevector(i);
            if lat.mode(i).0[2] == 0 {
                Complex64::default()
            } else {
                -(v.u1()[i] * k[0] + v.u2()[i] * k[1]) / k[2]
            }
        })
        .collect();
    SpectralScalar::from_coeffs(lat, coeffs, Parity::Odd).expect("lattice-sized")
}

/// `Q(U, V) = U . grad_h V + w(U) dz V`, exact and truncated, using the
/// dealiased transform backend. The result is not projected.
pub fn nonlinear_q(u_adv: &SpectralVelocity, v: &SpectralVelocity) -> Result<SpectralVelocity> {
    nonlinear_q_with(&product::FftProduct, u_adv, v)
}

pub fn nonlinear_q_with(
    backend: &dyn ProductBackend,
    u_adv: &SpectralVelocity,
    v: &SpectralVelocity,
) -> Result<SpectralVelocity> {
    check_same(u_adv.lattice(), v.lattice())?;
    let w = vertical_velocity(u_adv)?;
    Ok(backend.advect(u_adv.lattice(), [u_adv.u1(), u_adv.u2(), w.coeffs()], v))
}

/// Truncated pointwise product of two scalars.
pub fn scalar_product_with(
    backend: &dyn ProductBackend,
    f: &SpectralScalar,
    g: &SpectralScalar,
) -> Result<SpectralScalar> {
    check_same(f.lattice(), g.lattice())?;
    let parity = if f.parity() == g.parity() {
        Parity::Even
    } else {
        Parity::Odd
    };
    SpectralScalar::from_coeffs(
        f.lattice().clone(),
        backend.multiply(f.lattice(), f.coeffs(), g.coeffs()),
        parity,
    )
}

/// Physical values of one velocity component on an `m^3` grid.
pub fn component_on_grid(lattice: &Lattice, coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    fft::Transform3::shared(m).synthesize(lattice, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::WaveIndex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn noisy(n: usize, seed: u64) -> SpectralVelocity {
        let lat = Lattice::shared(n);
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let u1 = (0..lat.len()).map(|_| c(next(), next())).collect();
        let u2 = (0..lat.len()).map(|_| c(next(), next())).collect();
        SpectralVelocity::from_components(lat, u1, u2).unwrap()
    }

    /// `(sin(2 pi x1) cos(2 pi z), 0)`
    fn sin_cos_field(n: usize) -> SpectralVelocity {
        let mut v = SpectralVelocity::zeros(n);
        for (m1, s) in [(1, -0.25), (-1, 0.25)] {
            for m3 in [1, -1] {
                v.set(WaveIndex::new(m1, 0, m3), [c(0.0, s), c(0.0, 0.0)]);
            }
        }
        v
    }

    #[test]
    fn projection_zeroes_mean_only_when_rest_is_valid() {
        let mut v = sin_cos_field(2);
        let before = v.clone();
        v.set(WaveIndex::ZERO, [c(0.7, 0.0), c(-0.2, 0.0)]);
        let p = project_constraints(&v);
        assert!(p.sub(&before).unwrap().max_abs() < 1e-16);
        let q = project_constraints(&before);
        assert!(q.sub(&before).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn projection_of_noise_is_valid_and_idempotent() {
        let f = noisy(3, 5);
        let p = project_constraints(&f);
        assert!(
            p.check_invariants().holds(1e-14),
            "{:?}",
            p.check_invariants()
        );
        let pp = project_constraints(&p);
        assert!(pp.sub(&p).unwrap().max_abs() <= 1e-14 * p.max_abs());
        // nearest point: the residual is orthogonal to the constrained field
        let r = f.sub(&p).unwrap();
        assert!(r.inner(&p).unwrap().abs() < 1e-12 * f.l2_norm() * p.l2_norm());
    }

    #[test]
    fn split_is_exact() {
        let f = project_constraints(&noisy(2, 9));
        let (bar, tilde) = split_barotropic(&f);
        assert_eq!(
            bar.axpy(1.0, &tilde).unwrap().sub(&f).unwrap().max_abs(),
            0.0
        );
        let (b2, t2) = split_barotropic(&bar);
        assert_eq!(t2.max_abs(), 0.0);
        assert_eq!(b2.sub(&bar).unwrap().max_abs(), 0.0);
        let (b3, _) = split_barotropic(&tilde);
        assert_eq!(b3.max_abs(), 0.0);
    }

    #[test]
    fn leray_kills_gradients_and_keeps_solenoidal() {
        let lat = Lattice::shared(2);
        let mut grad = SpectralVelocity::zeros_on(lat.clone());
        let mut sol = SpectralVelocity::zeros_on(lat.clone());
        for i in 0..lat.len() {
            let m = lat.mode(i).0;
            if m[2] != 0 {
                continue;
            }
            let k = lat.wavevector(i);
            let psi = c(0.3 * m[0] as f64, 0.1 * m[1] as f64 + 0.2);
            grad.components_mut()[0][i] = psi * k[0];
            grad.components_mut()[1][i] = psi * k[1];
            sol.components_mut()[0][i] = -psi * k[1];
            sol.components_mut()[1][i] = psi * k[0];
        }
        assert!(leray_h(&grad).max_abs() < 1e-14 * grad.max_abs());
        assert!(leray_h(&sol).sub(&sol).unwrap().max_abs() < 1e-14 * sol.max_abs());
    }

    #[test]
    fn hydrostatic_leray_contracts() {
        let f = noisy(3, 17);
        let p = hydrostatic_leray(&f);
        assert!(p.l2_norm() <= f.l2_norm());
        assert!(hydrostatic_leray(&p).sub(&p).unwrap().max_abs() <= 1e-14 * p.max_abs());
        assert!(barotropic_divergence(&p) < 1e-13 * p.l2_norm());
        let (_, tilde) = split_barotropic(&f);
        assert_eq!(
            hydrostatic_leray(&tilde).sub(&tilde).unwrap().max_abs(),
            0.0
        );
    }

    #[test]
    fn vertical_velocity_of_sin_cos() {
        let v = sin_cos_field(2);
        let w = vertical_velocity(&v).unwrap();
        // w = -cos(2 pi x1) sin(2 pi z)
        let mut expect = SpectralScalar::zeros(2, Parity::Odd);
        for m1 in [1, -1] {
            expect.set(WaveIndex::new(m1, 0, 1), c(0.0, 0.25));
            expect.set(WaveIndex::new(m1, 0, -1), c(0.0, -0.25));
        }
        assert!(w.sub(&expect).unwrap().max_abs() < 1e-15);
        let (herm, par) = w.symmetry_defect();
        assert!(herm < 1e-16 && par < 1e-16);
    }

    #[test]
    fn vertical_velocity_rejects_unprojected() {
        let mut v = SpectralVelocity::zeros(2);
        v.set(WaveIndex::new(1, 0, 0), [c(1.0, 0.0), c(0.0, 0.0)]);
        v.set(WaveIndex::new(-1, 0, 0), [c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            vertical_velocity(&v),
            Err(Error::Incompressibility { .. })
        ));
    }

    #[test]
    fn q_rejects_mismatched_truncation() {
        let a = SpectralVelocity::zeros(2);
        let b = SpectralVelocity::zeros(3);
        assert!(matches!(
            nonlinear_q(&a, &b),
            Err(Error::TruncationMismatch { .. })
        ));
    }
}
