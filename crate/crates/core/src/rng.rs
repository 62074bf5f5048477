//! Per-sample random streams.
//!
//! Every sample draws from its own ChaCha stream keyed by `(seed, index)`, so
//! results do not depend on how samples are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream reserved for run-level draws (e.g. coordinate rotations), disjoint
/// from every per-sample stream.
pub fn run_rng(seed: u64) -> ChaCha8Rng {
    sample_rng(seed, u64::MAX)
}
