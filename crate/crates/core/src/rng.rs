//! Seed derivation.
//!
//! Every random draw in the crate comes from a `ChaCha8Rng` seeded by
//! [`derive_seed`]: the first eight bytes (little endian) of
//! `SHA-256(root_seed_le || domain || 0x00 || index_le)`. Components use a
//! fixed domain string (`"restart"`, `"level"`, `"basis"`, ...) and an index
//! (restart number, level number, ...), so the stream used by one component
//! never depends on how many draws another component made, nor on thread
//! scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

pub fn derive_seed(root: u64, domain: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update(domain.as_bytes());
    hasher.update([0u8]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(root: u64, domain: &str, index: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(root, domain, index))
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn real_gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
