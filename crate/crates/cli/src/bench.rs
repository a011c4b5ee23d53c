//! Wall-clock sweeps over entity counts and seat counts.

use std::time::Instant;

use apportion_core::{
    solve, ApportionmentProblem, Backend, DivisorMethod, Entity, MedianStrategy, Result,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub ns: Vec<usize>,
    pub ks: Vec<u64>,
    pub method: DivisorMethod,
    pub backends: Vec<Backend>,
    pub repeat: usize,
    pub seed: u64,
    pub median: MedianStrategy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: u64,
    pub method: String,
    pub backend: String,
    pub repeat: usize,
    pub median_seconds: f64,
}

/// `n` entities with scores drawn uniformly from `1..=10^6`.
pub fn entities(n: usize, seed: u64) -> Vec<Entity> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| Entity::new(format!("E{i}"), rng.gen_range(1..=1_000_000))).collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Times every `(n, k, backend)` combination, handing each row to `emit`
/// as soon as it is measured.
pub fn run(config: &BenchConfig, mut emit: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &config.ns {
        let entities = entities(n, config.seed);
        for &k in &config.ks {
            for &backend in &config.backends {
                let problem = ApportionmentProblem::new(config.method, entities.clone(), k)
                    .with_backend(backend)
                    .with_median(config.median);
                let mut times = Vec::with_capacity(config.repeat);
                for _ in 0..config.repeat.max(1) {
                    let start = Instant::now();
                    std::hint::black_box(solve(std::hint::black_box(&problem))?);
                    times.push(start.elapsed().as_secs_f64());
                }
                let row = BenchRow {
                    n,
                    k,
                    method: config.method.to_string(),
                    backend: backend.to_string(),
                    repeat: times.len(),
                    median_seconds: median(times),
                };
                emit(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn entities_are_seeded() {
        assert_eq!(entities(50, 7), entities(50, 7));
        assert_ne!(entities(50, 7), entities(50, 8));
    }
}
