//! Deterministic random streams.
//!
//! Every random draw in the crate comes from a ChaCha20 stream derived here.
//! Streams are keyed by a numeric seed plus a list of string parts
//! (length-prefixed before hashing, so `["ab", "c"]` and `["a", "bc"]`
//! produce different streams). SHA-256 keying keeps the derivation stable
//! across platforms and library versions, which the std `DefaultHasher`
//! does not guarantee.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

/// Derive an independent random stream from a seed and a context path.
pub fn derive_rng(seed: u64, parts: &[&str]) -> ChaCha20Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    ChaCha20Rng::from_seed(hasher.finalize().into())
}
