//! Fixtures shared by the benchmarks.

use onestreet::dataset::{build_dataset, BuildOptions};
use onestreet::deal::{make_joint, sample_simplex};
use onestreet::seed::rng_from_seed;
use onestreet::{Dataset, GameConfig, JointDeal};

/// `n` random deals from a fixed seed.
pub fn deals(n: usize, seed: u64) -> Vec<JointDeal> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x1 = sample_simplex(10, &mut rng);
        let x2 = sample_simplex(10, &mut rng);
        if let Ok(d) = make_joint(x1.as_slice(), x2.as_slice()) {
            out.push(d);
        }
    }
    out
}

/// A small solved dataset for the learning benchmarks.
pub fn dataset(games: usize) -> Dataset {
    build_dataset(games, 11, 1e-4, &GameConfig::default(), BuildOptions::default())
        .expect("benchmark dataset")
}
