//! Seeded, splittable random streams.
//!
//! Every stochastic operation takes an explicit generator. Monte Carlo loops
//! derive one independent substream per `(seed, point, trial)` path so results
//! never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere in the crate.
pub type PhotonRng = ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator seeded directly from a user seed.
pub fn from_seed(seed: u64) -> PhotonRng {
    substream(seed, &[])
}

/// Independent generator for the given index path under `seed`.
///
/// Distinct paths give statistically independent streams; the same path always
/// gives the same stream.
pub fn substream(seed: u64, path: &[u64]) -> PhotonRng {
    let mut state = seed ^ 0x6D63_6663_5F72_6E67;
    let _ = splitmix64(&mut state);
    for (depth, &index) in path.iter().enumerate() {
        state ^= index.wrapping_add(1).wrapping_mul(0xD6E8_FEB8_6659_FD93);
        state = state.rotate_left(17 + depth as u32);
        let _ = splitmix64(&mut state);
    }
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    PhotonRng::from_seed(key)
}
