//! Counter-based seed derivation.
//!
//! Trial `i` of a campaign with master seed `m` always gets
//! `derive_seed(m, i)`, independent of scheduling or worker count.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for stream `index` under `master`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}
