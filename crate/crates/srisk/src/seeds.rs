//! Splittable seed derivation and uniform variate helpers.
//!
//! Every source of randomness in the crate is a ChaCha stream keyed by a
//! 64-bit seed derived here. Child seeds are produced by hashing
//! (base, index) with the SplitMix64 finalizer, so
//!
//! - replication i of an experiment always sees the same stream no matter
//!   how work is scheduled across threads, and
//! - sibling streams (per-replication, per-arm) are decorrelated without
//!   any shared mutable state.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Odd constant from SplitMix64 (Steele, Lea & Flood); spaces successive
/// indices far apart before finalization.
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective avalanche mix on 64 bits.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed for child stream `index` of `base`.
///
/// Deterministic, order-free, and collision-resistant enough for Monte
/// Carlo work (distinct indices under one base never collide; collisions
/// across bases are as likely as random 64-bit matches).
pub fn child_seed(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add(GOLDEN_GAMMA).wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

/// Build the deterministic generator for a given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One uniform draw from the *open* interval (0, 1).
///
/// Uses the top 53 bits of the next word, centered on the representable
/// grid: u = (k + 0.5) · 2⁻⁵³ for k ∈ {0, …, 2⁵³−1}. Never returns 0 or 1,
/// so inverse-transform sampling cannot produce ±∞ quantiles.
pub fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform integer in `0..k` by rejection (no modulo bias). `k` must be ≥ 1.
pub fn uniform_index(rng: &mut ChaCha8Rng, k: usize) -> usize {
    debug_assert!(k >= 1);
    let k = k as u64;
    // Largest multiple of k that fits in u64; draws above it are rejected.
    let zone = u64::MAX - u64::MAX % k;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % k) as usize;
        }
    }
}
