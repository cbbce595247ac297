//! Named random streams derived from a master seed.
//!
//! The splitting rule: the master seed keys a ChaCha8 generator through
//! `seed_from_u64`, and each (replicate, stream) pair selects the ChaCha
//! stream number `replicate * 8 + stream`. Streams never overlap, and the
//! draws of replicate `i` do not depend on how many other replicates exist
//! or in which order they run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const STREAMS_PER_REPLICATE: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    PositionsRed = 0,
    PositionsBlue = 1,
    MarksRed = 2,
    MarksBlue = 3,
    /// Extra draws made by experiments on top of the configuration.
    Auxiliary = 4,
}

pub fn stream(master_seed: u64, replicate: u64, which: Stream) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(
        replicate
            .wrapping_mul(STREAMS_PER_REPLICATE)
            .wrapping_add(which as u64),
    );
    rng
}
