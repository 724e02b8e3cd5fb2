//! Truncated Fourier lattice on the unit torus.
//!
//! Modes are integer triples `m` with `|m_i| <= N`; the physical wavevector is
//! `k = 2*pi*m`. The third component is the vertical direction.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Lattice index `m = (m1, m2, m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveIndex(pub [i32; 3]);

impl WaveIndex {
    pub const ZERO: WaveIndex = WaveIndex([0, 0, 0]);

    pub fn new(m1: i32, m2: i32, m3: i32) -> Self {
        WaveIndex([m1, m2, m3])
    }

    /// Reflection `z -> -z`.
    pub fn zflip(self) -> Self {
        let [a, b, c] = self.0;
        WaveIndex([a, b, -c])
    }

    pub fn wavevector(self) -> [f64; 3] {
        let [a, b, c] = self.0;
        [
            2.0 * PI * a as f64,
            2.0 * PI * b as f64,
            2.0 * PI * c as f64,
        ]
    }

    pub fn magnitude(self) -> f64 {
        let k = self.wavevector();
        (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
    }

    pub fn max_abs(self) -> i32 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }
}

impl std::ops::Neg for WaveIndex {
    type Output = Self;

    fn neg(self) -> Self {
        let [a, b, c] = self.0;
        WaveIndex([-a, -b, -c])
    }
}

/// Precomputed geometry for truncation `N`. Shared between fields via `Arc`.
#[derive(Debug)]
pub struct Lattice {
    n: usize,
    side: usize,
    modes: Vec<WaveIndex>,
    k: Vec<[f64; 3]>,
    kmag: Vec<f64>,
    neg: Vec<usize>,
    zflip: Vec<usize>,
    by_magnitude_desc: Vec<usize>,
}

impl Lattice {
    pub fn new(n: usize) -> Self {
        let side = 2 * n + 1;
        let ni = n as i32;
        let mut modes = Vec::with_capacity(side * side * side);
        for a in -ni..=ni {
            for b in -ni..=ni {
                for c in -ni..=ni {
                    modes.push(WaveIndex([a, b, c]));
                }
            }
        }
        let k: Vec<[f64; 3]> = modes.iter().map(|m| m.wavevector()).collect();
        let kmag: Vec<f64> = modes.iter().map(|m| m.magnitude()).collect();
        let idx = |m: WaveIndex| -> usize {
            let [a, b, c] = m.0;
            (((a + ni) as usize * side) + (b + ni) as usize) * side + (c + ni) as usize
        };
        let neg = modes.iter().map(|&m| idx(-m)).collect();
        let zflip = modes.iter().map(|&m| idx(m.zflip())).collect();
        let mut by_magnitude_desc: Vec<usize> = (0..modes.len()).collect();
        by_magnitude_desc.sort_by(|&i, &j| kmag[j].total_cmp(&kmag[i]).then(i.cmp(&j)));
        Lattice {
            n,
            side,
            modes,
            k,
            kmag,
            neg,
            zflip,
            by_magnitude_desc,
        }
    }

    /// Process-wide cached lattice for truncation `n`.
    pub fn shared(n: usize) -> Arc<Lattice> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Lattice>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("lattice cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(Lattice::new(n)))
            .clone()
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    /// Modes per axis, `2N + 1`.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn contains(&self, m: WaveIndex) -> bool {
        m.max_abs() <= self.n as i32
    }

    pub fn index(&self, m: WaveIndex) -> Option<usize> {
        if !self.contains(m) {
            return None;
        }
        let ni = self.n as i32;
        let [a, b, c] = m.0;
        Some((((a + ni) as usize * self.side) + (b + ni) as usize) * self.side + (c + ni) as usize)
    }

    pub fn zero_index(&self) -> usize {
        self.index(WaveIndex::ZERO).unwrap()
    }

    pub fn mode(&self, i: usize) -> WaveIndex {
        self.modes[i]
    }

    pub fn modes(&self) -> &[WaveIndex] {
        &self.modes
    }

    pub fn wavevector(&self, i: usize) -> [f64; 3] {
        self.k[i]
    }

    pub fn magnitude(&self, i: usize) -> f64 {
        self.kmag[i]
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.kmag
    }

    pub fn neg_index(&self, i: usize) -> usize {
        self.neg[i]
    }

    pub fn zflip_index(&self, i: usize) -> usize {
        self.zflip[i]
    }

    /// Indices ordered from the largest `|k|` to the smallest.
    pub fn by_magnitude_desc(&self) -> &[usize] {
        &self.by_magnitude_desc
    }

    /// Largest wavenumber on the truncated cube, `2*pi*N*sqrt(3)`.
    pub fn max_magnitude(&self) -> f64 {
        2.0 * PI * self.n as f64 * 3f64.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip_and_partners() {
        let lat = Lattice::new(3);
        assert_eq!(lat.len(), 343);
        for (i, &m) in lat.modes().iter().enumerate() {
            assert_eq!(lat.index(m), Some(i));
            assert_eq!(lat.mode(lat.neg_index(i)), -m);
            assert_eq!(lat.mode(lat.zflip_index(i)), m.zflip());
        }
        assert_eq!(lat.mode(lat.zero_index()), WaveIndex::ZERO);
        assert_eq!(lat.index(WaveIndex::new(4, 0, 0)), None);
    }

    #[test]
    fn magnitude_order_is_descending() {
        let lat = Lattice::new(2);
        let ord = lat.by_magnitude_desc();
        assert!(ord
            .windows(2)
            .all(|w| lat.magnitude(w[0]) >= lat.magnitude(w[1])));
        assert!((lat.magnitude(ord[0]) - lat.max_magnitude()).abs() < 1e-12);
        assert_eq!(lat.magnitude(*ord.last().unwrap()), 0.0);
    }
}
