//! Reproducible random substreams.
//!
//! Every stream is a ChaCha12 generator whose 256-bit key is
//! `SHA-256("densmat/stream/v1" || master_seed_le || stream_index_le)`.
//! Streams are therefore addressed purely by `(master_seed, stream_index)`:
//! draw `i` of an experiment always sees the same bits, whichever worker runs
//! it and however many workers there are.
//!
//! Gaussian variates use the Box–Muller transform and consume exactly two
//! 64-bit words per complex entry, so the position of every entry in the
//! stream is fixed.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};
use std::f64::consts::TAU;

const STREAM_DOMAIN: &[u8] = b"densmat/stream/v1";
const SEED_DOMAIN: &[u8] = b"densmat/seed/v1";

/// 2^-53, the spacing of the 53-bit uniform grid.
const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

/// A deterministic random substream identified by `(master_seed, stream_index)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    inner: ChaCha12Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(STREAM_DOMAIN);
        hasher.update(master_seed.to_le_bytes());
        hasher.update(stream_index.to_le_bytes());
        let key: [u8; 32] = hasher.finalize().into();
        Self {
            master_seed,
            stream_index,
            inner: ChaCha12Rng::from_seed(key),
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform on `(0, 1]`; never returns zero so `ln` is always finite.
    pub fn uniform_open_closed(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) + 1) as f64 * UNIT
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * UNIT
    }

    /// Uniform index in `0..bound` (Lemire's multiply-shift; one word per call,
    /// bias below 2^-32 for the small bounds used here).
    pub fn index(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        ((self.inner.next_u64() as u128 * bound as u128) >> 64) as usize
    }

    /// Standard complex Gaussian `N_C(0, 1)`: real and imaginary parts are
    /// independent `N(0, 1/2)`, so `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let u1 = self.uniform_open_closed();
        let u2 = self.uniform();
        // |z|^2 = -ln u1 is Exp(1).
        let r = (-u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        Complex64::new(r * c, r * s)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Derive an independent master seed for a labelled sub-experiment, e.g. one
/// matrix size of a convergence sweep.
pub fn derive_seed(master_seed: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(SEED_DOMAIN);
    hasher.update(master_seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}
