//! Deterministic per-shot random streams.
//!
//! Every Monte-Carlo shot owns a ChaCha stream keyed by `(seed, stream)`, so
//! results do not depend on how shots are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for samples conditioned on the qubit in |g⟩.
pub const CLASS_G: u64 = 0;
/// Stream tag for samples conditioned on the qubit in |e⟩.
pub const CLASS_E: u64 = 1;

/// Returns the generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for shot `shot` of class `class` (upper 8 bits carry the class).
pub fn shot_rng(seed: u64, class: u64, shot: u64) -> ChaCha8Rng {
    debug_assert!(shot < 1 << 56);
    stream_rng(seed, (class << 56) | shot)
}

/// Derives an independent seed for a sub-experiment, e.g. one grid point.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
