//! Portable seeded random stream.
//!
//! The generator is SplitMix64 (Steele, Lea and Flood, 2014): the state is a
//! single `u64` advanced by the golden-ratio increment `0x9E3779B97F4A7C15`,
//! and each output is the state passed through the `mix64` finalizer below.
//! Uniform reals take the top 53 bits of an output and scale by `2^-53`,
//! so `uniform()` lies in `[0, 1)`. Any implementation following these three
//! lines reproduces our sample streams bit for bit.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Bijective 64-bit finalizer (the SplitMix64 / MurmurHash3 variant 13 mix).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..k`. Uses one `uniform()` draw.
    #[inline]
    pub fn below(&mut self, k: usize) -> usize {
        debug_assert!(k > 0);
        ((self.uniform() * k as f64) as usize).min(k - 1)
    }
}
