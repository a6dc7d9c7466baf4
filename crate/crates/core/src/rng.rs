use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Name of the generator recorded in output metadata.
pub const GENERATOR: &str = "ChaCha8 (seed_from_u64(master_seed), set_stream(stream_index))";

/// A reproducible random stream.
///
/// The generator is ChaCha8 keyed by `master_seed` via `seed_from_u64`, with
/// `stream_index` selecting one of its 2^64 independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// The stream for work item `index` under the same master seed.
    pub fn child(&self, index: u64) -> RngStream {
        RngStream::new(self.master_seed, index)
    }
}
