//! Deterministic seed derivation. Every random stream in the crate is a
//! ChaCha8 generator keyed by a value derived from the single user seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a, fixed across platforms and releases (unlike `DefaultHasher`).
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed for a named subsystem, e.g. `derive_seed(seed, "bootstrap")`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    splitmix64(seed ^ label_hash(label))
}

/// Seed for the `index`-th independent stream under `seed`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, index))
}
