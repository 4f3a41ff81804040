use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for sample `index` of a sweep: stream `index` of the ChaCha8 key derived from `seed`,
/// so samples do not depend on evaluation order.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
