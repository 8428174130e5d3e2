//! Seeded random number generation.
//!
//! All randomness in this crate flows through a ChaCha8 stream cipher keyed
//! by an explicit `u64` seed, so every experiment is reproducible across
//! platforms. Gaussian variates use the Box-Muller transform on top of the
//! uniform stream rather than a ziggurat, again for bit-level portability.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded, portable generator.
pub type Rng = ChaCha8Rng;

/// Creates a generator from a 64-bit seed.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample in `[0, 1)` with 53 random mantissa bits.
pub fn uniform(rng: &mut Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform sample in `(0, 1]`; never returns zero, so it is safe to log.
pub fn uniform_open(rng: &mut Rng) -> f64 {
    1.0 - uniform(rng)
}

/// Uniform sample in `[lo, hi)`.
pub fn uniform_in(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

/// Uniform integer in `[0, n)`.
pub fn uniform_usize(rng: &mut Rng, n: usize) -> usize {
    debug_assert!(n > 0);
    // Modulo bias is < 2^-40 for the desk-scale n used here.
    (rng.next_u64() % n as u64) as usize
}

/// Standard normal variate via Box-Muller (two uniforms per sample).
pub fn gaussian(rng: &mut Rng) -> f64 {
    let u1 = uniform_open(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Fills `out` with standard normal variates.
pub fn fill_gaussian(rng: &mut Rng, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = gaussian(rng);
    }
}

/// Mixes a base seed with a cell index into an independent stream seed.
///
/// SplitMix64 finalizer; distinct `(base, index)` pairs map to distinct
/// seeds with good avalanche behaviour.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = base ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
