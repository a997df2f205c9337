//! Deterministic random substreams.
//!
//! Every random quantity is drawn from a ChaCha8 stream keyed by the master
//! seed and a purpose tag, with the work-item index selecting the stream.
//! A draw's randomness therefore depends only on `(seed, purpose, index)`,
//! never on which worker thread handles it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a substream is used for. Keeps unrelated consumers of one master seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Permutation = 1,
    Graph = 2,
    Outcomes = 3,
    TrueGc = 4,
    Replication = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a label.
pub fn derive_seed(seed: u64, purpose: Purpose, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(purpose as u64)) ^ index)
}

/// The generator for work item `index` under `purpose`.
pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(purpose as u64)));
    rng.set_stream(index);
    rng
}
