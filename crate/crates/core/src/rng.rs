//! Deterministic, splittable random-number streams.
//!
//! A `(seed, stream_id)` pair fully determines every number drawn from the
//! stream, and distinct stream ids select statistically independent streams.
//! Replicate-level parallelism hands each replicate its own stream id, which
//! makes results independent of how work is scheduled across threads.

use rand_pcg::Pcg64;

/// The concrete generator behind every stream. PCG64 is specified purely in
/// terms of integer arithmetic, so sequences are reproducible across
/// platforms, and its stream selector provides 2^64 independent streams per
/// seed without any jump-ahead bookkeeping.
pub type SimRng = Pcg64;

/// Identifier of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Instantiate the generator positioned at the start of this stream.
    pub fn rng(&self) -> SimRng {
        // Expand the 64-bit seed into the generator's 128-bit state; the
        // stream id picks the LCG increment, PCG's native stream mechanism.
        let hi = splitmix64(self.seed);
        let lo = splitmix64(hi);
        Pcg64::new(((hi as u128) << 64) | lo as u128, self.stream_id as u128)
    }
}

/// SplitMix64 finalizer, the conventional way to spread a small seed over a
/// larger state.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
