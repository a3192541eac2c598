//! Seed derivation for reproducible parallel Monte Carlo runs.
//!
//! Every random draw in the library comes from a [`ChaCha8Rng`] whose seed is
//! derived from a master seed plus a small tuple of indices (stage, trial,
//! substream). Workers can therefore run trials in any order, on any number
//! of threads, and still reproduce the exact same draws.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Labels the independent random streams used by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Channel synthesis for one (trial, user) pair.
    Channel = 1,
    /// Sweep and pilot noise for one (trial, snr-point) pair.
    Estimation = 2,
    /// Free-form streams for tests and standalone draws.
    Aux = 3,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent generator from `(master, stage, a, b)`.
///
/// The indices are folded through a splitmix64 chain into a full 256-bit
/// ChaCha seed, so distinct tuples give statistically independent streams.
pub fn derive_rng(master: u64, stage: Stage, a: u64, b: u64) -> ChaCha8Rng {
    let mut state = master ^ 0x6a09_e667_f3bc_c908;
    for word in [stage as u64, a, b] {
        state = splitmix64(&mut state) ^ word.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// One sample of the standard circularly-symmetric complex Gaussian CN(0, 1):
/// real and imaginary parts are independent N(0, 1/2).
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// CN(0, variance) sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    standard_complex(rng) * variance.sqrt()
}
