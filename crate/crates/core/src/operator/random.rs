//! Seeded generators for random test operators.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OperatorMatrix;

/// Scales `ε` of the symmetric perturbation in [`OperatorSampler::quasi_skew`].
pub const QUASI_SKEW_SCALES: [f64; 3] = [0.01, 0.1, 1.0];

/// `S + εB` together with its two summands.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiSkew {
    pub op: OperatorMatrix,
    pub skew: OperatorMatrix,
    /// `εB`.
    pub sym: OperatorMatrix,
    pub eps: f64,
}

/// Draws matrices with i.i.d. entries uniform on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct OperatorSampler {
    rng: ChaCha8Rng,
}

impl OperatorSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, rows: usize, cols: usize) -> OperatorMatrix {
        let m = DMatrix::from_fn(rows, cols, |_, _| self.rng.gen_range(-1.0..=1.0));
        OperatorMatrix::from_trusted(m)
    }

    /// `(G − Gᵀ)/2`.
    pub fn skew(&mut self, n: usize) -> OperatorMatrix {
        let g = self.uniform(n, n).into_entries();
        OperatorMatrix::from_trusted((&g - g.transpose()) * 0.5)
    }

    /// `(G + Gᵀ)/2`.
    pub fn symmetric(&mut self, n: usize) -> OperatorMatrix {
        let g = self.uniform(n, n).into_entries();
        OperatorMatrix::from_trusted((&g + g.transpose()) * 0.5)
    }

    /// Diagonal matrix with entries uniform on `[lo, hi]`.
    pub fn diagonal(&mut self, n: usize, lo: f64, hi: f64) -> OperatorMatrix {
        let d = DVector::from_fn(n, |_, _| self.rng.gen_range(lo..=hi));
        OperatorMatrix::from_trusted(DMatrix::from_diagonal(&d))
    }

    pub fn quasi_skew(&mut self, n: usize, eps: f64) -> QuasiSkew {
        let skew = self.skew(n);
        let sym = self.symmetric(n).scale(eps);
        let op = OperatorMatrix::from_trusted(skew.entries() + sym.entries());
        QuasiSkew { op, skew, sym, eps }
    }

    /// One of [`QUASI_SKEW_SCALES`].
    pub fn scale(&mut self) -> f64 {
        *QUASI_SKEW_SCALES.choose(&mut self.rng).expect("non-empty")
    }

    pub fn vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.rng.gen_range(-1.0..=1.0))
    }

    pub fn size(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn real(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..=hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let a = OperatorSampler::new(7).quasi_skew(5, 0.1);
        let b = OperatorSampler::new(7).quasi_skew(5, 0.1);
        assert_eq!(a, b);
    }

    #[test]
    fn quasi_skew_parts_have_expected_symmetry() {
        let q = OperatorSampler::new(1).quasi_skew(6, 1.0);
        let s = q.skew.entries();
        let b = q.sym.entries();
        assert_eq!((s + s.transpose()).amax(), 0.0);
        assert_eq!((b - b.transpose()).amax(), 0.0);
    }
}
