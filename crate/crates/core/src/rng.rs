//! Counter-based random numbers.
//!
//! Every draw is a pure function of `(seed, stream, counter)`: the 64-bit
//! word is the SplitMix64 finalizer applied to
//! `seed + GOLDEN·(stream·2^32 + counter + 1)` (wrapping). Uniforms take the
//! top 53 bits, mapped to the open interval (0, 1). Standard normals use
//! Box–Muller on the counter pair (2k, 2k+1) and return the cosine branch, so
//! the k-th normal of a stream is reproducible in any language.

use std::f64::consts::TAU;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn splitmix64_mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A keyed counter-based generator. Cheap to copy; holds no mutable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
    stream: u64,
}

impl CounterRng {
    pub const NAME: &'static str = "splitmix64-counter";

    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Independent stream derived from the same seed.
    pub fn stream(self, stream: u64) -> Self {
        Self { seed: self.seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    pub fn word(&self, counter: u64) -> u64 {
        let index = (self.stream << 32).wrapping_add(counter).wrapping_add(1);
        splitmix64_mix(self.seed.wrapping_add(GOLDEN.wrapping_mul(index)))
    }

    /// Uniform in (0, 1).
    pub fn uniform(&self, counter: u64) -> f64 {
        ((self.word(counter) >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// k-th standard normal of the stream.
    pub fn normal(&self, k: u64) -> f64 {
        let u1 = self.uniform(2 * k);
        let u2 = self.uniform(2 * k + 1);
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }
}
