//! Three-dimensional complex transforms between lattice coefficients and a
//! uniform physical grid on the unit torus.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::lattice::Lattice;

/// Smallest 3-smooth grid size that evaluates quadratic products of modes
/// `|m| <= n` without aliasing back onto the retained cube (`M >= 3n + 1`).
pub fn dealiased_size(n: usize) -> usize {
    let mut m = (3 * n + 1).max(1);
    loop {
        let mut r = m;
        for p in [2, 3] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

pub struct Transform3 {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Transform3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform3").field("m", &self.m).finish()
    }
}

impl Transform3 {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Transform3 {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        }
    }

    pub fn shared(m: usize) -> Arc<Transform3> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Transform3>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("transform cache poisoned");
        guard
            .entry(m)
            .or_insert_with(|| Arc::new(Transform3::new(m)))
            .clone()
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    fn run(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        let m = self.m;
        debug_assert_eq!(data.len(), m * m * m);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        // last axis is contiguous
        fft.process_with_scratch(data, &mut scratch);
        let mut lines = vec![Complex64::default(); m * m];
        // middle axis
        for a in 0..m {
            let plane = &mut data[a * m * m..(a + 1) * m * m];
            for b in 0..m {
                for c in 0..m {
                    lines[c * m + b] = plane[b * m + c];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for b in 0..m {
                for c in 0..m {
                    plane[b * m + c] = lines[c * m + b];
                }
            }
        }
        // first axis
        for b in 0..m {
            for c in 0..m {
                for a in 0..m {
                    lines[c * m + a] = data[(a * m + b) * m + c];
                }
            }
            fft.process_with_scratch(&mut lines, &mut scratch);
            for c in 0..m {
                for a in 0..m {
                    data[(a * m + b) * m + c] = lines[c * m + a];
                }
            }
        }
    }

    fn slot(&self, lattice: &Lattice, i: usize) -> usize {
        let m = self.m as i32;
        let w = |x: i32| x.rem_euclid(m) as usize;
        let [a, b, c] = lattice.mode(i).0;
        (w(a) * self.m + w(b)) * self.m + w(c)
    }

    /// Values `f(x_j) = sum_k f_k e^{i k . x_j}` on the grid `x_j = j / M`.
    pub fn synthesize(&self, lattice: &Lattice, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert!(
            2 * lattice.truncation() < self.m,
            "grid too coarse for truncation"
        );
        let mut data = vec![Complex64::default(); self.m * self.m * self.m];
        for (i, c) in coeffs.iter().enumerate() {
            data[self.slot(lattice, i)] = *c;
        }
        self.run(&mut data, self.inverse.as_ref());
        data
    }

    /// Fourier coefficients of grid values, restricted to the lattice cube.
    pub fn analyze(&self, lattice: &Lattice, mut values: Vec<Complex64>) -> Vec<Complex64> {
        self.run(&mut values, self.forward.as_ref());
        let norm = 1.0 / (self.m * self.m * self.m) as f64;
        (0..lattice.len())
            .map(|i| values[self.slot(lattice, i)] * norm)
            .collect()
    }
}
