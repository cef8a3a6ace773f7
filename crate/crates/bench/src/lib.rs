//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `count` uniform `n`-bit inputs, reproducible from `seed`.
pub fn random_inputs(n: usize, count: usize, seed: u64) -> Vec<u64> {
    assert!((1..=64).contains(&n), "n must be in 1..=64");
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen::<u64>() & mask).collect()
}
