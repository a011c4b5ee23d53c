//! Workloads shared by the criterion benches.

use apportion_core::{DivisorMethod, EntitySequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` scores drawn uniformly from `1..=10^6`.
pub fn scores(n: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(1..=1_000_000)).collect()
}

pub fn sequences(method: DivisorMethod, scores: &[u64]) -> Vec<EntitySequence> {
    scores
        .iter()
        .enumerate()
        .map(|(i, &v)| EntitySequence::new(method, i, v).expect("scores are positive"))
        .collect()
}
