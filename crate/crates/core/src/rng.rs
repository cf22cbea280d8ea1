//! Deterministic random sub-streams.
//!
//! Every consumer of randomness asks for its own stream keyed by
//! `(master_seed, purpose, index)`. Streams never share state, so changing how
//! many numbers one stage draws leaves every other stage untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator type handed out by [`substream`].
pub type StreamRng = ChaCha8Rng;

/// Stream tags in use across the crate.
pub mod tag {
    pub const SIGMA: &str = "sigma";
    pub const EDGES: &str = "edges";
    pub const NOISE: &str = "noise";
    pub const START_VECTOR: &str = "start-vector";
    pub const BP_INIT: &str = "bp-init";
    pub const POPDYN: &str = "popdyn";
    pub const TRIAL: &str = "trial";
}

/// Derive a 256-bit seed from the triple and build a ChaCha8 stream from it.
pub fn substream(master: u64, purpose: &str, index: u64) -> StreamRng {
    StreamRng::from_seed(derive_seed(master, purpose, index))
}

/// Derive a 64-bit child seed, e.g. the instance seed for trial `index`.
pub fn child_seed(master: u64, purpose: &str, index: u64) -> u64 {
    let bytes = derive_seed(master, purpose, index);
    u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
}

fn derive_seed(master: u64, purpose: &str, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update((purpose.len() as u64).to_le_bytes());
    hasher.update(purpose.as_bytes());
    hasher.update(index.to_le_bytes());
    hasher.finalize().into()
}
