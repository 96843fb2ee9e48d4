//! Fixed inputs shared by the benchmarks.

use sl2h_core::harness::{sample_sl2h, trial_rng, SampleDistribution};
use sl2h_core::MatH2;

/// `count` SL matrices from the normal-form mixture, reproducible from `seed`.
pub fn fixtures(seed: u64, count: usize) -> Vec<MatH2> {
    let mut rng = trial_rng(seed, 0);
    let dist = SampleDistribution::NormalForms { scale: 1.0 };
    (0..count).map(|_| sample_sl2h(&mut rng, &dist)).collect()
}

/// Gaussian SL matrices; all entries are nonzero with probability one.
pub fn generic(seed: u64, count: usize) -> Vec<MatH2> {
    let mut rng = trial_rng(seed, 0);
    let dist = SampleDistribution::default();
    (0..count).map(|_| sample_sl2h(&mut rng, &dist)).collect()
}
