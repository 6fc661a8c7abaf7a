//! Seeded, reproducible random streams.
//!
//! Every random quantity in this workspace is a deterministic function of a
//! 64-bit master seed plus a path of indices (cell index, trial index,
//! resample attempt, ...). The derivation is fixed:
//!
//! 1. Each path component is folded into the running state with the
//!    splitmix64 finalizer ([`mix64`]), starting from the master seed.
//! 2. The derived 64-bit value seeds a ChaCha8 stream cipher RNG
//!    (`ChaCha8Rng::seed_from_u64`, itself a documented splitmix64 expansion).
//! 3. Unit doubles use the 53-bit mantissa mapping `(u >> 11) * 2^-53`,
//!    yielding values in `[0, 1)`.
//!
//! ChaCha8 output is platform-independent, so identical seeds reproduce runs
//! bit-exactly anywhere.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// splitmix64 finalizer — the standard avalanche mix.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Derives a stream seed from a master seed and a path of indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut state = mix64(master ^ GOLDEN_GAMMA);
    for (depth, part) in path.iter().enumerate() {
        state = mix64(
            state
                .wrapping_add(part.wrapping_mul(GOLDEN_GAMMA))
                .wrapping_add(depth as u64 + 1),
        );
    }
    state
}

/// A ChaCha8 stream for the given seed path.
pub fn substream(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

/// Uniform double in `[0, 1)` from the top 53 bits of the next word.
#[inline]
pub fn unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform double in `(0, 1]`; safe as a logarithm argument.
#[inline]
pub fn unit_positive(rng: &mut impl RngCore) -> f64 {
    1.0 - unit(rng)
}
