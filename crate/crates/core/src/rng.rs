//! Seed derivation for reproducible, order-independent random streams.
//!
//! Every unit of work (graph weights, a selection, a trial) gets its own
//! ChaCha8 stream whose seed is a pure function of the master seed and a small
//! key path. Results therefore do not depend on how work is scheduled across
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream domains, used as the first key component.
pub mod domain {
    pub const GRAPH_WEIGHTS: u64 = 0x6772_6170_6877;
    pub const SELECTION: u64 = 0x7365_6c65_6374;
    pub const TRIAL: u64 = 0x7472_6961_6c00;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `keys` into `master` with SplitMix64 finalisation at every step.
pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(splitmix64(master), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn stream(master: u64, keys: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(master, keys))
}
