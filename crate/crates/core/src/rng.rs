//! Deterministic counter-based random streams.
//!
//! Each stream is keyed by a `(seed, index)` pair, so ensembles can assign an
//! independent stream to every sample: regeneration is bit-identical for a
//! fixed key and independent of evaluation order. The generator is a
//! splitmix64 walk; normal deviates come from the Box–Muller transform. Not
//! cryptographically secure.

use crate::fmath;

const GAMMA: u64 = 0x9E3779B97F4A7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// A deterministic stream of pseudo-random numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    /// Stream for top-level use (equivalent to `keyed(seed, 0)`).
    pub fn from_seed(seed: u64) -> Self {
        Self::keyed(seed, 0)
    }

    /// Stream keyed by `(seed, index)`; distinct indices give decorrelated
    /// streams under the same seed.
    pub fn keyed(seed: u64, index: u64) -> Self {
        let state = mix64(seed ^ GAMMA) ^ mix64(index.wrapping_mul(GAMMA).wrapping_add(1));
        Self { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// A pair of independent standard normal deviates (Box–Muller).
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u = self.next_open01();
        let v = self.next_f64();
        let r = fmath::sqrt(-2.0 * fmath::ln(u));
        let theta = 2.0 * core::f64::consts::PI * v;
        (r * fmath::cos(theta), r * fmath::sin(theta))
    }

    /// A single standard normal deviate (draws a pair, discards half).
    pub fn next_normal(&mut self) -> f64 {
        self.next_normal_pair().0
    }
}
