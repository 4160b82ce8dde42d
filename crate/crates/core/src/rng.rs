//! Deterministic derivation of independent random streams.
//!
//! Every stochastic routine in this crate draws from a [`ChaCha8Rng`] keyed
//! by a base seed plus a path of integer identifiers (stream tag, sample
//! size, replication index, ...). The same `(seed, ids)` pair always yields
//! the same stream, and the derivation is associative-free: parallel and
//! serial schedules consume identical randomness per work unit, so results
//! agree bit for bit regardless of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Collapse `(seed, ids)` into a single derived seed.
pub fn derive_seed(seed: u64, ids: &[u64]) -> u64 {
    let mut state = seed;
    let mut out = splitmix64(&mut state);
    for &id in ids {
        state ^= id;
        out = splitmix64(&mut state);
    }
    out
}

/// Build the random stream identified by `(seed, ids)`.
pub fn stream_rng(seed: u64, ids: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(seed, ids);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
