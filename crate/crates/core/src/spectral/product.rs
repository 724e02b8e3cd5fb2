//! Exact truncated products of spectral fields.
//!
//! Two interchangeable evaluators share one contract: the result is the exact
//! convolution of the inputs, truncated back to the lattice cube.
//!
//! * `fft` transforms to a zero-padded grid of size `>= 3N + 1`, multiplies
//!   pointwise and transforms back. Cost `O(M^3 log M)`; round-off is uniform
//!   across modes, of order `eps * |f| |g|`.
//! * `direct` sums the triads `j + l = k` explicitly. Cost `O(len^2)`;
//!   round-off at mode `k` is relative to `sum_j |f_j| |g_{k-j}|`, which keeps
//!   exponentially small high modes accurate. Needed whenever the result is
//!   measured in a Gevrey norm whose weight `e^{phi |k|^s}` exceeds `1/eps`.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::fft::{dealiased_size, Transform3};
use crate::field::{FourierField, SpectralVelocity};
use crate::lattice::Lattice;
use crate::registry::{Named, Registry};

pub trait ProductBackend: Named + Send + Sync {
    /// `(a . grad) v` for each component of `v`, where `a = (a1, a2, a3)` is
    /// given by coefficient arrays on the same lattice and `grad = (d1, d2, dz)`.
    fn advect(
        &self,
        lattice: &Arc<Lattice>,
        adv: [&[Complex64]; 3],
        v: &SpectralVelocity,
    ) -> SpectralVelocity;

    /// Pointwise product of two scalar fields, truncated.
    fn multiply(&self, lattice: &Arc<Lattice>, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct FftProduct;

impl Named for FftProduct {
    fn name(&self) -> &'static str {
        "fft"
    }
}

fn times_i(z: Complex64) -> Complex64 {
    Complex64::new(-z.im, z.re)
}

/// Exact check of `f_{-k} = conj(f_k)`, i.e. real grid values.
fn is_hermitian(lattice: &Lattice, f: &[Complex64]) -> bool {
    (0..f.len()).all(|i| f[lattice.neg_index(i)] == f[i].conj())
}

fn is_zero(f: &[Complex64]) -> bool {
    f.iter().all(|z| z.re == 0.0 && z.im == 0.0)
}

/// Grid values of real fields, two per transform (`F = f + i g`). Identically
/// zero inputs map to `None` and are never mixed into a transform, so they
/// stay exactly zero downstream.
fn synthesize_real(
    tr: &Transform3,
    lattice: &Lattice,
    inputs: &[Vec<Complex64>],
) -> Vec<Option<Vec<f64>>> {
    let mut out: Vec<Option<Vec<f64>>> = vec![None; inputs.len()];
    let live: Vec<usize> = (0..inputs.len())
        .filter(|&i| !is_zero(&inputs[i]))
        .collect();
    for pair in live.chunks(2) {
        match *pair {
            [a, b] => {
                let packed: Vec<Complex64> = inputs[a]
                    .iter()
                    .zip(&inputs[b])
                    .map(|(x, y)| x + times_i(*y))
                    .collect();
                let (x, y) = tr
                    .synthesize(lattice, &packed)
                    .into_iter()
                    .map(|z| (z.re, z.im))
                    .unzip();
                out[a] = Some(x);
                out[b] = Some(y);
            }
            [a] => {
                out[a] = Some(
                    tr.synthesize(lattice, &inputs[a])
                        .into_iter()
                        .map(|z| z.re)
                        .collect(),
                )
            }
            _ => unreachable!(),
        }
    }
    out
}

/// Coefficients of up to two real grid fields from one transform.
fn analyze_real(
    tr: &Transform3,
    lattice: &Lattice,
    x: Option<&[f64]>,
    y: Option<&[f64]>,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let len = lattice.len();
    let packed: Vec<Complex64> = match (x, y) {
        (None, None) => {
            return (
                vec![Complex64::default(); len],
                vec![Complex64::default(); len],
            )
        }
        (Some(x), Some(y)) => x
            .iter()
            .zip(y)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect(),
        (Some(x), None) => x.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        (None, Some(y)) => y.iter().map(|&b| Complex64::new(b, 0.0)).collect(),
    };
    let c = tr.analyze(lattice, packed);
    let re = |i: usize| (c[i] + c[lattice.neg_index(i)].conj()) * 0.5;
    let im = |i: usize| Complex64::new(0.0, -0.5) * (c[i] - c[lattice.neg_index(i)].conj());
    let zeros = || vec![Complex64::default(); len];
    match (x, y) {
        (Some(_), Some(_)) => ((0..len).map(re).collect(), (0..len).map(im).collect()),
        (Some(_), None) => ((0..len).map(re).collect(), zeros()),
        _ => (zeros(), (0..len).map(re).collect()),
    }
}

fn grid_len(tr: &Transform3) -> usize {
    tr.grid_size().pow(3)
}

impl FftProduct {
    /// Real-field path: inputs with Hermitian symmetry are transformed two at a time.
    fn advect_real(
        &self,
        tr: &Transform3,
        lattice: &Arc<Lattice>,
        adv: [&[Complex64]; 3],
        v: &SpectralVelocity,
    ) -> SpectralVelocity {
        let mut inputs: Vec<Vec<Complex64>> = adv.iter().map(|a| a.to_vec()).collect();
        for comp in v.components() {
            for d in 0..3 {
                inputs.push(
                    comp.iter()
                        .enumerate()
                        .map(|(i, z)| times_i(*z) * lattice.wavevector(i)[d])
                        .collect(),
                );
            }
        }
        let phys = synthesize_real(tr, lattice, &inputs);
        let mut acc: [Option<Vec<f64>>; 2] = [None, None];
        for (c, out) in acc.iter_mut().enumerate() {
            for d in 0..3 {
                if let (Some(a), Some(b)) = (&phys[d], &phys[3 * (1 + c) + d]) {
                    let sum = out.get_or_insert_with(|| vec![0.0; grid_len(tr)]);
                    for ((s, a), b) in sum.iter_mut().zip(a).zip(b) {
                        *s += a * b;
                    }
                }
            }
        }
        let (o1, o2) = analyze_real(tr, lattice, acc[0].as_deref(), acc[1].as_deref());
        SpectralVelocity::from_components(lattice.clone(), o1, o2)
            .expect("lattice-sized components")
    }
}

impl ProductBackend for FftProduct {
    fn advect(
        &self,
        lattice: &Arc<Lattice>,
        adv: [&[Complex64]; 3],
        v: &SpectralVelocity,
    ) -> SpectralVelocity {
        let tr = Transform3::shared(dealiased_size(lattice.truncation()));
        if adv.iter().all(|a| is_hermitian(lattice, a))
            && v.components().iter().all(|c| is_hermitian(lattice, c))
        {
            return self.advect_real(&tr, lattice, adv, v);
        }
        let adv_phys: Vec<Vec<Complex64>> = adv.iter().map(|a| tr.synthesize(lattice, a)).collect();
        let mut out = SpectralVelocity::zeros_on(lattice.clone());
        let mut deriv = vec![Complex64::default(); lattice.len()];
        for (c, comp) in v.components().iter().enumerate() {
            let mut acc = vec![Complex64::default(); tr.grid_size().pow(3)];
            for d in 0..3 {
                if adv[d].iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    continue;
                }
                for (i, z) in comp.iter().enumerate() {
                    deriv[i] = times_i(*z) * lattice.wavevector(i)[d];
                }
                let dv = tr.synthesize(lattice, &deriv);
                for ((s, a), b) in acc.iter_mut().zip(&adv_phys[d]).zip(&dv) {
                    *s += a * b;
                }
            }
            out.components_mut()[c] = tr.analyze(lattice, acc);
        }
        out
    }

    fn multiply(&self, lattice: &Arc<Lattice>, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let tr = Transform3::shared(dealiased_size(lattice.truncation()));
        if is_hermitian(lattice, f) && is_hermitian(lattice, g) {
            let phys = synthesize_real(&tr, lattice, &[f.to_vec(), g.to_vec()]);
            let prod = match (&phys[0], &phys[1]) {
                (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(a, b)| a * b).collect::<Vec<_>>()),
                _ => None,
            };
            return analyze_real(&tr, lattice, prod.as_deref(), None).0;
        }
        let mut pf = tr.synthesize(lattice, f);
        let pg = tr.synthesize(lattice, g);
        for (a, b) in pf.iter_mut().zip(&pg) {
            *a *= b;
        }
        tr.analyze(lattice, pf)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct DirectProduct;

impl Named for DirectProduct {
    fn name(&self) -> &'static str {
        "direct"
    }
}

/// Iterates `(j, l)` slot pairs with `j + l = k` inside the cube.
#[inline]
fn for_each_triad(lattice: &Lattice, k: usize, mut f: impl FnMut(usize, usize)) {
    let n = lattice.truncation() as i32;
    let side = lattice.side();
    let [k1, k2, k3] = lattice.mode(k).0;
    let lo = |x: i32| (x - n).max(-n);
    let hi = |x: i32| (x + n).min(n);
    let idx = |a: i32, b: i32, c: i32| {
        (((a + n) as usize * side) + (b + n) as usize) * side + (c + n) as usize
    };
    for a in lo(k1)..=hi(k1) {
        for b in lo(k2)..=hi(k2) {
            for c in lo(k3)..=hi(k3) {
                f(idx(a, b, c), idx(k1 - a, k2 - b, k3 - c));
            }
        }
    }
}

impl ProductBackend for DirectProduct {
    fn advect(
        &self,
        lattice: &Arc<Lattice>,
        adv: [&[Complex64]; 3],
        v: &SpectralVelocity,
    ) -> SpectralVelocity {
        let len = lattice.len();
        let active: Vec<bool> = (0..len)
            .map(|j| adv.iter().any(|a| a[j].re != 0.0 || a[j].im != 0.0))
            .collect();
        let (v1, v2) = (v.u1(), v.u2());
        let mut o1 = vec![Complex64::default(); len];
        let mut o2 = vec![Complex64::default(); len];
        for k in 0..len {
            let mut s1 = Complex64::default();
            let mut s2 = Complex64::default();
            for_each_triad(lattice, k, |j, l| {
                if !active[j] {
                    return;
                }
                let kl = lattice.wavevector(l);
                let s = times_i(adv[0][j] * kl[0] + adv[1][j] * kl[1] + adv[2][j] * kl[2]);
                s1 += s * v1[l];
                s2 += s * v2[l];
            });
            o1[k] = s1;
            o2[k] = s2;
        }
        SpectralVelocity::from_components(lattice.clone(), o1, o2)
            .expect("lattice-sized components")
    }

    fn multiply(&self, lattice: &Arc<Lattice>, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); lattice.len()];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = Complex64::default();
            for_each_triad(lattice, k, |j, l| s += f[j] * g[l]);
            *o = s;
        }
        out
    }
}

pub fn registry() -> &'static Registry<dyn ProductBackend> {
    static REG: OnceLock<Registry<dyn ProductBackend>> = OnceLock::new();
    REG.get_or_init(|| {
        let fft: Arc<dyn ProductBackend> = Arc::new(FftProduct);
        let direct: Arc<dyn ProductBackend> = Arc::new(DirectProduct);
        Registry::new("product backend").with(fft).with(direct)
    })
}

/// Largest `phi * kmax^s` for which the `fft` backend's uniform round-off
/// stays below roughly `1e-3` relative once weighted by `e^{phi |k|^s}`.
pub const FFT_PRECISION_EXPONENT: f64 = 30.0;

/// Picks `direct` when the exponential weights that will be applied to the
/// product exceed what uniform round-off tolerates.
pub fn auto_select(weight_exponent: f64) -> Arc<dyn ProductBackend> {
    let name = if weight_exponent > FFT_PRECISION_EXPONENT {
        "direct"
    } else {
        "fft"
    };
    registry().get(name).expect("builtin backend")
}
