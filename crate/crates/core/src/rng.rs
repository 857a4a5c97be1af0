//! Seeded, splittable random streams.
//!
//! Every Monte Carlo work item gets its own ChaCha stream derived from the
//! experiment seed and a small tuple of indices, so results do not depend on
//! how the work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mix a label and indices into a stream id (splitmix64 finalizer).
pub fn stream_id(label: u64, a: u64, b: u64) -> u64 {
    let mut z = label
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(a.wrapping_mul(0xBF58_476D_1CE4_E5B9))
        .wrapping_add(b.wrapping_mul(0x94D0_49BB_1331_11EB));
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for work item `(label, a, b)` under `seed`.
pub fn substream(seed: u64, label: u64, a: u64, b: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(label, a, b));
    rng
}
