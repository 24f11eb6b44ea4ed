//! Deterministic seed derivation.
//!
//! Every random draw in the crate flows from a user seed through
//! [`derive_seed`], so parallel execution order never changes results.

/// Domain tags keeping independent consumers of one user seed decorrelated.
pub mod tag {
    pub const CONCEPT: u64 = 0x636f_6e63_6570_74;
    pub const CHUNK: u64 = 0x6368_756e_6b;
    pub const KMEANS: u64 = 0x6b6d_6561_6e73;
    pub const IDENTIFY: u64 = 0x6964_656e_74;
    pub const STREAM: u64 = 0x7374_7265_616d;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed from `(seed, stream_tag, index)`.
pub fn derive_seed(seed: u64, stream_tag: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream_tag ^ splitmix64(index)))
}
