//! Seed derivation shared by the generators and the simulator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer applied to `seed` offset by `stream`.
///
/// Distinct `(seed, stream)` pairs give well-separated 64-bit seeds, so
/// resampling attempts and experiment sides never share a generator state.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for replica `index` of a job seeded with `seed`.
///
/// ChaCha is counter based: the stream id selects an independent keystream,
/// so replica `i` sees the same numbers regardless of scheduling.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
