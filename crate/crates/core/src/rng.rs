//! Seeded randomness.
//!
//! Every random stream is a ChaCha8 generator seeded from a 64-bit value.
//! Independent substreams are derived with [`mix`], a SplitMix64-style hash
//! of the parent seed and a list of integer labels, so that parallel work
//! items draw the same numbers regardless of evaluation order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a seed and labels into a new seed.
pub fn mix(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix(seed), |h, &l| splitmix(h ^ splitmix(l)))
}

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for the substream `labels` of `seed`.
pub fn substream(seed: u64, labels: &[u64]) -> SeededRng {
    seeded(mix(seed, labels))
}

/// Uniform sample from the probability simplex with `k` vertices
/// (normalised exponential variates).
pub fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.gen::<f64>();
            -libm::log(1.0 - u)
        })
        .collect();
    let sum: f64 = x.iter().sum();
    if sum > 0.0 {
        for v in &mut x {
            *v /= sum;
        }
    } else {
        x.iter_mut().for_each(|v| *v = 1.0 / k as f64);
    }
    x
}
