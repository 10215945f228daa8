//! Deterministic randomness: one base seed, independent numbered streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::Real;

/// Splits one seed into independent ChaCha streams addressed by a counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSplitter {
    seed: u64,
}

impl SeedSplitter {
    pub fn new(seed: u64) -> Self {
        SeedSplitter { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for stream `index`. Streams never overlap.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Child splitter, for nesting (e.g. one per complex, then one per trial).
    pub fn child(&self, index: u64) -> SeedSplitter {
        // splitmix64 finalizer
        let mut z = self.seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        SeedSplitter { seed: z ^ (z >> 31) }
    }
}

/// Vector of independent standard normal samples.
pub fn gaussian_vec<T: Real, R: rand::Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<T> {
    (0..len)
        .map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            T::lit(x)
        })
        .collect()
}
