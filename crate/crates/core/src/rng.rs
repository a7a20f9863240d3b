//! Reproducible random streams: a counter-based generator keyed by
//! (seed, stream index) so parallel sweep points draw independent,
//! platform-stable sequences.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step, used to decorrelate (seed, stream) into ChaCha keys.
fn splitmix64(state: &mut u64) {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    *state = z ^ (z >> 31);
}

/// Derives a child seed for run `index` of a sweep keyed by `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut state = seed ^ index.wrapping_mul(0x9E3779B97F4A7C15);
    splitmix64(&mut state);
    splitmix64(&mut state);
    state
}

/// ChaCha8 generator keyed by (seed, stream).
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut state = seed ^ 0xA076_1D64_78BD_642F;
    for chunk in key.chunks_mut(8) {
        splitmix64(&mut state);
        let mixed = state ^ stream.rotate_left(17);
        chunk.copy_from_slice(&mixed.to_le_bytes());
        state ^= stream.wrapping_mul(0x2545_F491_4F6C_DD1D);
    }
    ChaCha8Rng::from_seed(key)
}
