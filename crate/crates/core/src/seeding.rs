//! Deterministic seed management.
//!
//! Every random choice in the crate flows from a single 64-bit seed through
//! `child_seed`, a counter-based split: task `k` of a run gets an
//! independent stream derived from `(seed, k)`. Search results are therefore
//! invariant under how work is partitioned among threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 finalizer; good avalanche, stable across platforms.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive the seed for independent stream `stream` of a run seeded by `seed`.
pub fn child_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_mul(0xa0761d6478bd642f)))
}

/// A reproducible generator for the given seed (ChaCha12: portable output).
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
