//! Reproducible per-replica random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Stream for replica `index` under `master_seed`. ChaCha streams are
/// counter based, so the draws of one replica never depend on how many
/// other replicas ran before it or on which thread.
pub fn replica_stream(master_seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
