use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator every party uses. ChaCha keeps streams identical across
/// platforms, which the transcript determinism checks rely on.
pub type SeededRng = ChaCha8Rng;

/// Independent stream `stream` derived from `seed`.
pub fn party_rng(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator for item `index` of a run seeded with `seed`. Seed and index
/// both go into the key, so runs with nearby seeds share no items.
pub fn indexed_rng(seed: u64, index: u64, stream: u64) -> SeededRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Child generator seeded from the parent's output.
pub fn split_rng(parent: &mut SeededRng) -> SeededRng {
    ChaCha8Rng::seed_from_u64(parent.next_u64())
}
