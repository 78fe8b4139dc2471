use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// ChaCha with 8 rounds: a published, platform-independent stream cipher
/// whose output for a given seed is fixed across architectures.
pub type DegradeRng = ChaCha8Rng;

/// `ChaCha8Rng::seed_from_u64`, which expands the seed with PCG32.
pub fn rng_from_seed(seed: u64) -> DegradeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-record seed: `splitmix64(global_seed ^ splitmix64(record_index))`.
///
/// Records get independent streams, so they can be degraded in any order
/// or in parallel and still reproduce the same bytes.
pub fn record_seed(global_seed: u64, record_index: u64) -> u64 {
    splitmix64(global_seed ^ splitmix64(record_index))
}
