//! Seeded generators. Every random routine takes an explicit seed; there is no
//! global generator state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Counter-based ChaCha generator used everywhere in the crate.
pub type Rng = ChaCha8Rng;

/// Seed for the `index`-th independent stream (trial, restart, case) of a run.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ index
}

pub fn rng(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

pub fn stream(seed: u64, index: u64) -> Rng {
    rng(derive_seed(seed, index))
}
