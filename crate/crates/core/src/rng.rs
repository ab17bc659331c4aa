//! Seeded random streams.
//!
//! Every randomized routine takes a `&mut R where R: Rng`. Sessions that
//! shard work derive one independent stream per shard from `(seed, index)`
//! using ChaCha's stream selector, so results do not depend on how shards
//! are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The concrete generator used by the session harnesses.
pub type RandomStream = ChaCha8Rng;

/// Stream `index` of the family rooted at `seed`.
pub fn derive_stream(seed: u64, index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
