//! Minimal deterministic PRNG (splitmix64).
//!
//! Used for seeded probe matrices and seeded sample directions. A fixed
//! in-crate generator keeps every seeded output byte-identical across runs
//! and toolchain updates.

/// splitmix64 stream.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Uniform direction on the sphere, returned as (theta, phi).
    pub fn next_direction(&mut self) -> (f64, f64) {
        let z = self.next_signed();
        let phi = self.next_f64() * 2.0 * std::f64::consts::PI;
        (z.clamp(-1.0, 1.0).acos(), phi)
    }
}
