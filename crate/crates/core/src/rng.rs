//! Reproducible, splittable random streams.
//!
//! Every stream is a ChaCha12 generator keyed by the 64-bit run seed and
//! placed on the ChaCha stream selected by the replica index. Streams with
//! distinct indices never overlap, and a given `(seed, replica)` pair always
//! yields the same sequence.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Generator used by all samplers and simulators.
pub type SimRng = ChaCha12Rng;

/// Seed plus stream-splitting for parallel replicas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngContract {
    pub seed: u64,
}

impl RngContract {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Stream for replica `index`.
    pub fn stream(&self, index: u64) -> SimRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Streams `0..count`.
    pub fn streams(&self, count: usize) -> Vec<SimRng> {
        (0..count as u64).map(|i| self.stream(i)).collect()
    }
}
