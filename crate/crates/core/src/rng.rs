//! Deterministic seed derivation.
//!
//! Every random structure in the crate is seeded from a 64-bit integer
//! through the functions here, so runs are reproducible and independent of
//! execution order: replica k of sweep point j always receives the same
//! stream no matter how many workers run or which replicas ran before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag separating a replica's topology draw from its search RNG.
pub(crate) const STREAM_TOPOLOGY: u64 = 0x544f504f;
/// Stream tag for the agent-update stream of a replica.
pub(crate) const STREAM_DYNAMICS: u64 = 0x44594e41;

/// SplitMix64 finalizer; bijective on u64 with strong avalanche.
fn finalize(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and an index (replica number,
/// sweep point, attempt counter, stream tag).
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    finalize(parent ^ finalize(index))
}

/// Seed for one replica of one sweep point under a master seed.
pub fn replica_seed(master: u64, point_index: u64, replica_index: u64) -> u64 {
    derive_seed(derive_seed(master, point_index), replica_index)
}

/// The crate-wide generator: small, fast, seedable, platform-independent.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
