//! Deterministic counter-based randomness.
//!
//! Every draw is a pure function of its key `(seed, tag, step, index)`,
//! produced by feeding the key words through the SplitMix64 finalizer.
//! No generator state is threaded through the simulation, so results do
//! not depend on evaluation order and are stable across platforms.

/// Key tag for per-step reconsideration coin flips.
pub const TAG_RECONSIDER: u64 = 1;
/// Key tag for intrinsic-weight draws at population construction.
pub const TAG_WEIGHT: u64 = 2;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A keyed draw: uniform over all of `u64`.
pub fn draw_u64(seed: u64, tag: u64, step: u64, index: u64) -> u64 {
    let mut z = seed;
    z = mix(z.wrapping_add(GOLDEN).wrapping_add(tag));
    z = mix(z.wrapping_add(GOLDEN).wrapping_add(step));
    z = mix(z.wrapping_add(GOLDEN).wrapping_add(index));
    z
}

/// A keyed draw mapped to `[0, 1)` with 53-bit resolution.
pub fn unit_f64(seed: u64, tag: u64, step: u64, index: u64) -> f64 {
    (draw_u64(seed, tag, step, index) >> 11) as f64 / 9_007_199_254_740_992.0
}

/// Small stateful generator for fixture and test construction.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in `[0, n)` by modulo; the bias is irrelevant at the
    /// ranges used for fixture generation.
    pub fn next_range(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        self.next_u64() % n
    }

    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / 9_007_199_254_740_992.0
    }
}
