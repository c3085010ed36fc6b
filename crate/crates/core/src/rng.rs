//! Seed handling shared by every sampler.
//!
//! All randomness is derived from a `u64` seed. Sequential samplers use a
//! [`ChaCha8Rng`]; per-slot streams that need random access hash
//! `(seed, index)` through SplitMix64 instead of keeping a generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed for sub-stream `index`.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ mix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Uniform in `[0, 1)` as a pure function of `(seed, index)`.
#[inline]
pub fn hashed_uniform(seed: u64, index: u64) -> f64 {
    // 53 high bits -> [0, 1)
    (derive_seed(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashed_uniform_is_pure_and_in_range() {
        for i in 0..10_000 {
            let u = hashed_uniform(7, i);
            assert!((0.0..1.0).contains(&u));
            assert_eq!(u, hashed_uniform(7, i));
        }
    }

    #[test]
    fn hashed_uniform_mean() {
        let n = 200_000;
        let mean: f64 = (0..n).map(|i| hashed_uniform(11, i)).sum::<f64>() / n as f64;
        // sd of mean = 1/sqrt(12 n)
        assert!((mean - 0.5).abs() < 4.0 / (12.0 * n as f64).sqrt());
    }
}
