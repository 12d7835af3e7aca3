//! Seeded random stream shared by every stochastic component.
//!
//! Backed by ChaCha8, whose output is specified independently of platform
//! word size and endianness, so a seed reproduces the same draws everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform draw in `[low, high)`. A degenerate interval returns `low`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        if low < high {
            self.inner.gen_range(low..high)
        } else {
            low
        }
    }
}
