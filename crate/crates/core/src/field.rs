//! Truncated spectral fields: the horizontal velocity pair and scalars.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, WaveIndex};

/// Vertical parity of a scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Common access to the coefficient arrays of a spectral field.
///
/// Every component is stored densely over the lattice cube in the order
/// given by [`Lattice::modes`].
pub trait FourierField: Clone {
    fn lattice(&self) -> &Arc<Lattice>;
    fn components(&self) -> &[Vec<Complex64>];
    fn components_mut(&mut self) -> &mut [Vec<Complex64>];

    fn truncation(&self) -> usize {
        self.lattice().truncation()
    }

    /// Sum over components of `|f_k|^2` at lattice slot `i`.
    fn mode_energy(&self, i: usize) -> f64 {
        self.components().iter().map(|c| c[i].norm_sqr()).sum()
    }

    fn map_modes(&self, mut factor: impl FnMut(usize) -> f64) -> Self {
        let mut out = self.clone();
        let lat = out.lattice().clone();
        for comp in out.components_mut() {
            for (i, c) in comp.iter_mut().enumerate().take(lat.len()) {
                *c *= factor(i);
            }
        }
        out
    }

    /// Real part of the `L^2` inner product `sum_k f_k conj(g_k)`.
    fn inner(&self, other: &Self) -> Result<f64> {
        check_same(self.lattice(), other.lattice())?;
        let mut acc = 0.0;
        for (a, b) in self.components().iter().zip(other.components()) {
            for (x, y) in a.iter().zip(b) {
                acc += (x * y.conj()).re;
            }
        }
        Ok(acc)
    }

    fn l2_norm(&self) -> f64 {
        let lat = self.lattice().clone();
        (0..lat.len())
            .map(|i| self.mode_energy(i))
            .sum::<f64>()
            .sqrt()
    }

    fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn is_zero(&self) -> bool {
        self.components()
            .iter()
            .all(|c| c.iter().all(|z| *z == Complex64::new(0.0, 0.0)))
    }

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        for comp in out.components_mut() {
            for z in comp.iter_mut() {
                *z *= a;
            }
        }
        out
    }

    /// `self + a * other`
    fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        check_same(self.lattice(), other.lattice())?;
        let mut out = self.clone();
        for (o, b) in out.components_mut().iter_mut().zip(other.components()) {
            for (x, y) in o.iter_mut().zip(b) {
                *x += a * y;
            }
        }
        Ok(out)
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }
}

pub(crate) fn check_same(a: &Lattice, b: &Lattice) -> Result<()> {
    if a.truncation() != b.truncation() {
        return Err(Error::TruncationMismatch {
            left: a.truncation(),
            right: b.truncation(),
        });
    }
    Ok(())
}

/// Horizontal velocity `(u^1, u^2)` as truncated complex Fourier coefficients.
#[derive(Debug, Clone)]
pub struct SpectralVelocity {
    lattice: Arc<Lattice>,
    comps: [Vec<Complex64>; 2],
}

impl SpectralVelocity {
    pub fn zeros(n: usize) -> Self {
        Self::zeros_on(Lattice::shared(n))
    }

    pub fn zeros_on(lattice: Arc<Lattice>) -> Self {
        let len = lattice.len();
        SpectralVelocity {
            lattice,
            comps: [
                vec![Complex64::default(); len],
                vec![Complex64::default(); len],
            ],
        }
    }

    pub fn from_components(
        lattice: Arc<Lattice>,
        u1: Vec<Complex64>,
        u2: Vec<Complex64>,
    ) -> Result<Self> {
        if u1.len() != lattice.len() || u2.len() != lattice.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients per component, got {} and {}",
                lattice.len(),
                u1.len(),
                u2.len()
            )));
        }
        Ok(SpectralVelocity {
            lattice,
            comps: [u1, u2],
        })
    }

    pub fn get(&self, m: WaveIndex) -> Option<[Complex64; 2]> {
        self.lattice
            .index(m)
            .map(|i| [self.comps[0][i], self.comps[1][i]])
    }

    /// Sets the coefficient pair at `m`. Returns `false` when `m` is outside the truncation.
    pub fn set(&mut self, m: WaveIndex, value: [Complex64; 2]) -> bool {
        match self.lattice.index(m) {
            Some(i) => {
                self.comps[0][i] = value[0];
                self.comps[1][i] = value[1];
                true
            }
            None => false,
        }
    }

    pub fn u1(&self) -> &[Complex64] {
        &self.comps[0]
    }

    pub fn u2(&self) -> &[Complex64] {
        &self.comps[1]
    }

    /// Checks the four structural constraints of the solution space.
    pub fn check_invariants(&self) -> InvariantReport {
        let lat = &self.lattice;
        let scale = self.max_abs();
        let mut rep = InvariantReport {
            scale,
            ..Default::default()
        };
        for i in 0..lat.len() {
            let ni = lat.neg_index(i);
            let zi = lat.zflip_index(i);
            for c in &self.comps {
                rep.hermitian = rep.hermitian.max((c[i] - c[ni].conj()).norm());
                rep.parity = rep.parity.max((c[i] - c[zi]).norm());
            }
            let m = lat.mode(i);
            if m.0[2] == 0 && (m.0[0] != 0 || m.0[1] != 0) {
                let k = lat.wavevector(i);
                let kh = (k[0] * k[0] + k[1] * k[1]).sqrt();
                let d = (self.comps[0][i] * k[0] + self.comps[1][i] * k[1]) / kh;
                rep.divergence = rep.divergence.max(d.norm());
            }
        }
        let z = lat.zero_index();
        rep.mean = self.comps[0][z].norm().max(self.comps[1][z].norm());
        rep
    }
}

impl FourierField for SpectralVelocity {
    fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }
    fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }
    fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.comps
    }
}

/// Largest absolute violation of each structural constraint, plus the field's
/// largest coefficient magnitude for relative comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvariantReport {
    pub hermitian: f64,
    pub mean: f64,
    pub parity: f64,
    /// Normalised barotropic divergence `|k' . u| / |k'|`.
    pub divergence: f64,
    pub scale: f64,
}

impl InvariantReport {
    pub fn worst(&self) -> f64 {
        self.hermitian
            .max(self.mean)
            .max(self.parity)
            .max(self.divergence)
    }

    pub fn worst_relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.worst()
        } else {
            self.worst() / self.scale
        }
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.worst() <= rel_tol * self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Scalar field such as the vertical velocity.
#[derive(Debug, Clone)]
pub struct SpectralScalar {
    lattice: Arc<Lattice>,
    coeffs: [Vec<Complex64>; 1],
    parity: Parity,
}

impl SpectralScalar {
    pub fn zeros(n: usize, parity: Parity) -> Self {
        Self::zeros_on(Lattice::shared(n), parity)
    }

    pub fn zeros_on(lattice: Arc<Lattice>, parity: Parity) -> Self {
        let len = lattice.len();
        SpectralScalar {
            lattice,
            coeffs: [vec![Complex64::default(); len]],
            parity,
        }
    }

    pub fn from_coeffs(
        lattice: Arc<Lattice>,
        coeffs: Vec<Complex64>,
        parity: Parity,
    ) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                lattice.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralScalar {
            lattice,
            coeffs: [coeffs],
            parity,
        })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs[0]
    }

    pub fn get(&self, m: WaveIndex) -> Option<Complex64> {
        self.lattice.index(m).map(|i| self.coeffs[0][i])
    }

    pub fn set(&mut self, m: WaveIndex, value: Complex64) -> bool {
        match self.lattice.index(m) {
            Some(i) => {
                self.coeffs[0][i] = value;
                true
            }
            None => false,
        }
    }

    /// Largest deviation from Hermitian symmetry and from the tagged parity.
    pub fn symmetry_defect(&self) -> (f64, f64) {
        let lat = &self.lattice;
        let c = &self.coeffs[0];
        let sign = match self.parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        };
        let mut herm: f64 = 0.0;
        let mut par: f64 = 0.0;
        for i in 0..lat.len() {
            herm = herm.max((c[i] - c[lat.neg_index(i)].conj()).norm());
            par = par.max((c[i] - sign * c[lat.zflip_index(i)]).norm());
        }
        (herm, par)
    }
}

impl FourierField for SpectralScalar {
    fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }
    fn components(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }
    fn components_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.coeffs
    }
}
