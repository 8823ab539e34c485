//! Seeded, platform-independent randomness.
//!
//! Every stochastic operation in this crate takes an explicit 64-bit seed
//! and draws from a ChaCha8 stream keyed by it (`ChaCha8Rng::seed_from_u64`,
//! which expands the seed with SplitMix64). There is no global generator.
//! `derive_seed` combines a base seed with stream labels so restarts,
//! replicates, and grid points get distinct reproducible streams.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; the mixing step behind `derive_seed`.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministically derive a sub-stream seed: splitmix64 chained over
/// `base` and each label in order.
pub fn derive_seed(base: u64, stream: &[u64]) -> u64 {
    let mut s = splitmix64(base);
    for &part in stream {
        s = splitmix64(s ^ part);
    }
    s
}

/// Uniform draw in [0, 1) with 53 bits of precision: (next_u64 >> 11) * 2^-53.
pub fn uniform01(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform integer in [0, bound) by rejection; no modulo bias.
pub fn uniform_below(rng: &mut impl RngCore, bound: usize) -> usize {
    assert!(bound > 0, "bound must be positive");
    let bound = bound as u64;
    // largest multiple of `bound` representable below 2^64
    let zone = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < zone {
            return (x % bound) as usize;
        }
    }
}
