//! Deterministic random-number plumbing.
//!
//! Every piece of randomness in the crate flows from a single `u64` master
//! seed. Parallel work items (bootstrap replicates, Monte Carlo replicates,
//! multistart perturbations) each get their own ChaCha stream keyed by the
//! item index, so results do not depend on scheduling or worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for a (seed, stream) pair. Streams are independent by construction.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child master seed for a nested replication level
/// (e.g. Monte Carlo replicate -> bootstrap replicates within it).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer over the combined state
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
