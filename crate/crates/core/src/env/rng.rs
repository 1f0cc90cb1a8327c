//! Counter-based randomness keyed by `(seed, stream, site)`.
//!
//! Every per-site variate is a pure function of its key, so any window over
//! the lattice sees the same values regardless of placement or iteration
//! order. Sequential streams for samplers are ChaCha8 generators keyed by
//! `(seed, stream, replica)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Site;

/// Stream namespaces. Weights and coupling uniforms never share a key.
pub mod stream {
    pub const WEIGHTS: u64 = 0x5745_4947_4854_5321;
    pub const COUPLING: u64 = 0x434f_5550_4c49_4e47;
    pub const SAMPLER: u64 = 0x5341_4d50_4c45_5221;
    pub const HORIZON: u64 = 0x484f_5249_5a4f_4e53;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const GOLDEN2: u64 = 0xc2b2_ae3d_27d4_eb4f;

/// splitmix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn key2(seed: u64, stream: u64, a: u64, b: u64) -> u64 {
    let k = mix64(seed ^ stream);
    let k = mix64(k.wrapping_add(a.wrapping_mul(GOLDEN)));
    mix64(k.wrapping_add(b.wrapping_mul(GOLDEN2)))
}

#[inline]
pub fn site_key(seed: u64, stream: u64, s: Site) -> u64 {
    key2(seed, stream, s.u as u64, s.v as u64)
}

/// Uniform in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `(0, 1)` with 52 random bits; never returns 0 or 1.
#[inline]
pub fn open_unit_f64(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Independent sequential generator for replica `index` under `seed`.
pub fn replica_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(key2(seed, stream, index, 0))
}

/// Derived seed for replica `index`; used to give each replica its own field.
pub fn replica_seed(seed: u64, index: u64) -> u64 {
    key2(seed, stream::SAMPLER, index, 0x7265_706c)
}
