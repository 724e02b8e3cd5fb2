#![allow(dead_code)]

use std::sync::Arc;

use hydrostat::initial::random_decay_field;
use hydrostat::lattice::Lattice;
use hydrostat::spectral::component_on_grid;
use hydrostat::{FourierField, SpectralVelocity};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform noise in every coefficient, no constraints imposed.
pub fn noisy(n: usize, seed: u64) -> SpectralVelocity {
    let lat = Lattice::shared(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let u1 = (0..lat.len()).map(&mut draw).collect();
    let u2 = (0..lat.len()).map(&mut draw).collect();
    SpectralVelocity::from_components(lat, u1, u2).unwrap()
}

/// Projected random field normalized to unit L2 norm.
pub fn projected(n: usize, decay: f64, seed: u64) -> SpectralVelocity {
    let v = random_decay_field(n, decay, 0.0, seed, 0);
    v.scaled(1.0 / v.l2_norm())
}

/// Physical values of both components on an `m^3` grid, index `(a m + b) m + c`.
pub fn on_grid(f: &SpectralVelocity, m: usize) -> [Vec<Complex64>; 2] {
    [
        component_on_grid(f.lattice(), f.u1(), m),
        component_on_grid(f.lattice(), f.u2(), m),
    ]
}

pub fn grid_point(m: usize, idx: usize) -> [f64; 3] {
    let c = idx % m;
    let b = (idx / m) % m;
    let a = idx / (m * m);
    [
        a as f64 / m as f64,
        b as f64 / m as f64,
        c as f64 / m as f64,
    ]
}

pub fn lattice(n: usize) -> Arc<Lattice> {
    Lattice::shared(n)
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
