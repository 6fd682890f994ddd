//! Deterministic RNG streams.
//!
//! Each run derives independent named substreams from its seed so that the
//! draws of one subsystem never shift another's, and so that runs differing
//! only in policy consume identical topology, mobility, traffic and channel
//! realizations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64; used only to expand seeds into independent stream keys.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Named substreams of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Topology,
    Mobility,
    Traffic,
    Shadowing,
    Fading,
    Lvq,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Topology => 0x01,
            Stream::Mobility => 0x02,
            Stream::Traffic => 0x03,
            Stream::Shadowing => 0x04,
            Stream::Fading => 0x05,
            Stream::Lvq => 0x06,
        }
    }
}

/// RNG for one named substream of the given run seed.
pub fn stream_rng(run_seed: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(run_seed ^ splitmix64(stream.tag())))
}

/// Per-run seed derived from a batch master seed and run index.
pub fn derive_run_seed(master_seed: u64, run_index: usize) -> u64 {
    splitmix64(master_seed.wrapping_add(splitmix64(run_index as u64 + 1)))
}
