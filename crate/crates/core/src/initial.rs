//! Named initial-data families. Every family returns a field satisfying the
//! constraints (real, mean-free, even in `z`, barotropically solenoidal).

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::field::{FourierField, SpectralVelocity};
use crate::lattice::{Lattice, WaveIndex};
use crate::registry::{Named, Registry};
use crate::spectral::project_constraints;
use crate::stochastic::path_rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialParams {
    /// L2 norm of the returned field (exact for every family except `zero`).
    pub amplitude: f64,
    pub seed: u64,
    /// Algebraic decay exponent of `random-decay` coefficients.
    pub decay: f64,
    /// Analytic decay `e^{-rho |k|}` of `random-decay` coefficients.
    pub rho: f64,
}

impl Default for InitialParams {
    fn default() -> Self {
        InitialParams {
            amplitude: 1e-2,
            seed: 0,
            decay: 3.9,
            rho: 0.0,
        }
    }
}

pub trait InitialFamily: Named + Send + Sync {
    fn build(&self, n: usize, p: &InitialParams) -> Result<SpectralVelocity>;
}

fn normalized(f: SpectralVelocity, amplitude: f64) -> Result<SpectralVelocity> {
    if !(amplitude >= 0.0) {
        return Err(invalid(format!(
            "amplitude must be non-negative, got {amplitude}"
        )));
    }
    let norm = f.l2_norm();
    if norm == 0.0 {
        return Ok(f);
    }
    Ok(f.scaled(amplitude / norm))
}

fn put(f: &mut SpectralVelocity, m: WaveIndex, v: [Complex64; 2]) {
    let conj = [v[0].conj(), v[1].conj()];
    for (mm, vv) in [(m, v), (-m, conj), (m.zflip(), v), (-m.zflip(), conj)] {
        f.set(mm, vv);
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Zero;

impl Named for Zero {
    fn name(&self) -> &'static str {
        "zero"
    }
}

impl InitialFamily for Zero {
    fn build(&self, n: usize, _p: &InitialParams) -> Result<SpectralVelocity> {
        Ok(SpectralVelocity::zeros(n))
    }
}

/// `(cos(2 pi x2) cos(2 pi z), 0)`: a steady shear, `Q = 0`.
#[derive(Debug, Default, Clone, Copy)]
pub struct SingleMode;

impl Named for SingleMode {
    fn name(&self) -> &'static str {
        "single-mode"
    }
}

impl InitialFamily for SingleMode {
    fn build(&self, n: usize, p: &InitialParams) -> Result<SpectralVelocity> {
        let mut f = SpectralVelocity::zeros(n);
        put(
            &mut f,
            WaveIndex::new(0, 1, 1),
            [Complex64::new(0.25, 0.0), Complex64::default()],
        );
        normalized(f, p.amplitude)
    }
}

/// `(cos(2 pi x2) cos(2 pi z), cos(2 pi x1) cos(2 pi z))`: horizontally
/// solenoidal, with a non-zero transport term.
#[derive(Debug, Default, Clone, Copy)]
pub struct TwoMode;

impl Named for TwoMode {
    fn name(&self) -> &'static str {
        "two-mode"
    }
}

impl InitialFamily for TwoMode {
    fn build(&self, n: usize, p: &InitialParams) -> Result<SpectralVelocity> {
        let mut f = SpectralVelocity::zeros(n);
        let q = Complex64::new(0.25, 0.0);
        put(&mut f, WaveIndex::new(0, 1, 1), [q, Complex64::default()]);
        put(&mut f, WaveIndex::new(1, 0, 1), [Complex64::default(), q]);
        normalized(f, p.amplitude)
    }
}

/// Independent complex Gaussian coefficients scaled by `|k|^{-decay} e^{-rho |k|}`, then projected.
#[derive(Debug, Default, Clone, Copy)]
pub struct RandomDecay;

impl Named for RandomDecay {
    fn name(&self) -> &'static str {
        "random-decay"
    }
}

/// Raw (unnormalized) random-decay field on stream `stream` of `seed`.
pub fn random_decay_field(
    n: usize,
    decay: f64,
    rho: f64,
    seed: u64,
    stream: u64,
) -> SpectralVelocity {
    let lat = Lattice::shared(n);
    let mut rng = path_rng(seed, stream);
    let mut comps = [
        vec![Complex64::default(); lat.len()],
        vec![Complex64::default(); lat.len()],
    ];
    for i in 0..lat.len() {
        let k = lat.magnitude(i);
        let scale = if k == 0.0 {
            0.0
        } else {
            (-decay * k.ln() - rho * k).exp()
        };
        for c in comps.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c[i] = Complex64::new(re, im) * scale;
        }
    }
    let [u1, u2] = comps;
    let raw = SpectralVelocity::from_components(lat, u1, u2).expect("lattice-sized");
    project_constraints(&raw)
}

impl InitialFamily for RandomDecay {
    fn build(&self, n: usize, p: &InitialParams) -> Result<SpectralVelocity> {
        if !(p.decay >= 0.0) || !(p.rho >= 0.0) {
            return Err(invalid("random-decay needs non-negative decay and rho"));
        }
        normalized(
            random_decay_field(n, p.decay, p.rho, p.seed, 0),
            p.amplitude,
        )
    }
}

pub fn registry() -> &'static Registry<dyn InitialFamily> {
    static REG: OnceLock<Registry<dyn InitialFamily>> = OnceLock::new();
    REG.get_or_init(|| {
        let items: [Arc<dyn InitialFamily>; 4] = [
            Arc::new(Zero),
            Arc::new(SingleMode),
            Arc::new(TwoMode),
            Arc::new(RandomDecay),
        ];
        items
            .into_iter()
            .fold(Registry::new("initial-data family"), Registry::with)
    })
}

pub fn build(family: &str, n: usize, p: &InitialParams) -> Result<SpectralVelocity> {
    registry().get(family)?.build(n, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_satisfy_constraints_and_amplitude() {
        let p = InitialParams {
            amplitude: 0.3,
            seed: 5,
            ..InitialParams::default()
        };
        for name in registry().names() {
            let f = build(name, 3, &p).unwrap();
            assert!(f.check_invariants().holds(1e-13), "{name}");
            if name != "zero" {
                assert!((f.l2_norm() - 0.3).abs() < 1e-14, "{name}");
            }
        }
        assert!(build("vortex", 3, &p).is_err());
    }
}
