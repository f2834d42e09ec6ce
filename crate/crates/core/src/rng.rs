//! Deterministic random number generation.
//!
//! Stochastic decisions in this crate (pruning draws, fit probe directions)
//! come from [`counter_uniform`], a stateless hash of `(seed, index,
//! counter)`. Because every draw is addressed rather than sequenced, results
//! are independent of evaluation order and thread count.

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash `(seed, index, counter)` to a uniform value in `[0, 1)`.
#[inline]
pub fn counter_uniform(seed: u64, index: u64, counter: u64) -> f64 {
    let mut h = mix(seed ^ 0x9E37_79B9_7F4A_7C15);
    h = mix(h ^ index);
    h = mix(h ^ counter);
    // take 53 high-quality bits for a full-precision f64 mantissa
    ((h >> 11) as f64) * (1.0 / (1u64 << 53) as f64)
}

/// Sequential SplitMix64 generator, used for fixture and test data.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix(self.state)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = self.next_f64().max(f64::MIN_POSITIVE);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
