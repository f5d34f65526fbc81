use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` under a global seed; distinct trials get
/// statistically unrelated keys.
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(trial.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Independent ChaCha stream for `(seed, trial, row)`.
pub fn row_stream(seed: u64, trial: u64, row: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, trial));
    rng.set_stream(row);
    rng
}
