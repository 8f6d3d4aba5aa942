//! Seeded random streams.
//!
//! Every random decision in the toolkit draws from a stream derived from one
//! user seed, a named purpose, and up to two integer keys. Streams with
//! different keys are independent, so work can be split across threads
//! without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Named sub-streams of the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Walks = 1,
    WalkOrder = 2,
    Negatives = 3,
    Splits = 4,
    Init = 5,
    Triplets = 6,
    Corruption = 7,
    Classify = 8,
    Cluster = 9,
    Sampling = 10,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent generator for `(seed, stream, a, b)`.
pub fn substream(seed: u64, stream: Stream, a: u64, b: u64) -> Rng {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ stream as u64);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b.rotate_left(17));
    ChaCha8Rng::seed_from_u64(h)
}
