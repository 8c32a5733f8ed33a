//! Deterministic seed derivation.
//!
//! Every random choice in a run flows from one master seed. Each obfuscation
//! pass derives its stream from the master seed and a hash of the exact text
//! it is about to transform, and each rewrite site derives from that plus its
//! ordinal. Keying on content rather than file paths makes an N-iteration run
//! byte-identical to N single-iteration runs chained by hand, and keeps
//! per-file work order-independent.

use rand::rngs::StdRng;
use rand::SeedableRng;

/// SplitMix64 finalizer; one cheap, well-mixed step per derivation.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over raw bytes; stable across platforms and runs.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Child seed from a parent seed and an arbitrary tag.
pub fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// Stream for one obfuscation pass over `text`.
pub fn pass_seed(master: u64, text: &str) -> u64 {
    derive(master, fnv1a64(text.as_bytes()))
}

/// RNG for the `ordinal`-th rewrite event within a pass.
pub fn site_rng(pass_seed: u64, ordinal: u64) -> StdRng {
    StdRng::seed_from_u64(derive(pass_seed, ordinal))
}
