//! Seed derivation.
//!
//! Every random stream in the crate is keyed by a tuple of integers and names
//! rather than by a shared generator, so results do not depend on the order in
//! which scenes or nodes are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for all sampling.
pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn avalanche(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combine two 64-bit values into one well-mixed seed.
#[inline]
pub fn mix(a: u64, b: u64) -> u64 {
    avalanche(
        a.wrapping_add(0x9e37_79b9_7f4a_7c15)
            .wrapping_add(avalanche(b)),
    )
}

/// FNV-1a over the UTF-8 bytes. Stable across platforms and releases.
pub fn name_hash(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for one scene under a global seed.
pub fn scene_seed(global_seed: u64, scene_id: u64) -> u64 {
    mix(global_seed, scene_id)
}

/// Seed for one node within a scene.
pub fn node_seed(scene_seed: u64, node: &str) -> u64 {
    mix(scene_seed, name_hash(node))
}

/// Seed for a labelled sub-stream (`"render"`, `"scene"`, ...).
pub fn stream_seed(seed: u64, label: &str) -> u64 {
    mix(seed, name_hash(label))
}

pub fn rng_from(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
