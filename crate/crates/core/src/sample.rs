//! Deterministic sample sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 100;

/// `n` points drawn uniformly from `[lo, hi]^dim`.
pub fn points(seed: u64, n: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(lo..=hi)).collect()).collect()
}

/// Default sample: `n` points in `[-1, 1]^dim`.
pub fn unit_box(seed: u64, n: usize, dim: usize) -> Vec<Vec<f64>> {
    points(seed, n, dim, -1.0, 1.0)
}

/// Source of reproducible randomness for generators.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    #[test]
    fn reproducible() {
        assert_eq!(super::unit_box(7, 3, 4), super::unit_box(7, 3, 4));
        assert_ne!(super::unit_box(7, 3, 4), super::unit_box(8, 3, 4));
    }
}
