//! Seed derivation and the two sampling regimes used by the optimizers.
//!
//! Every random stream in the crate is a [`ChaCha8Rng`] seeded from a 64-bit
//! value. Child seeds are derived with [`derive_seed`], a SplitMix64-style
//! finaliser chained over the parent seed and a list of labels, so adding a
//! new child never perturbs existing ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// SplitMix64 output function (Steele, Lea & Flood).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `derive_seed(s, [a, b, ...]) = mix64(... mix64(mix64(s) ^ a) ^ b ...)`.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(mix64(master), |acc, &label| mix64(acc ^ label))
}

/// 64-bit FNV-1a, used to turn string identifiers into seed labels.
pub fn label_of(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform subsets drawn without replacement by a partial Fisher-Yates
/// shuffle over a persistent index buffer.
///
/// The buffer is not reset between draws: a partial shuffle of any
/// arrangement still yields a uniformly distributed subset.
#[derive(Debug, Clone)]
pub struct SubsetSampler {
    buf: Vec<usize>,
}

impl SubsetSampler {
    pub fn new(n: usize) -> Self {
        Self { buf: (0..n).collect() }
    }

    pub fn population(&self) -> usize {
        self.buf.len()
    }

    /// Returns `k` distinct indices. Panics if `k` exceeds the population.
    pub fn draw<R: Rng + ?Sized>(&mut self, k: usize, rng: &mut R) -> &[usize] {
        let n = self.buf.len();
        assert!(k <= n, "subset size {k} exceeds population {n}");
        for i in 0..k {
            let j = rng.random_range(i..n);
            self.buf.swap(i, j);
        }
        &self.buf[..k]
    }
}

/// `k` independent uniform draws from `0..n` (sampling with replacement).
pub fn draw_with_replacement<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..k).map(|_| rng.random_range(0..n)));
}
