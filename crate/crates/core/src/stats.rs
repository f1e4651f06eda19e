//! Monte Carlo summaries.
//!
//! Trials are evaluated in parallel but collected in trial order, and every
//! reduction runs over that ordered buffer. Results are therefore identical
//! for any number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

/// Two-sided 99% normal quantile.
pub const DEFAULT_Z: f64 = 2.576;

/// Mean, standard error and normal-approximation interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimateCI {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl EstimateCI {
    /// Panics on fewer than two samples.
    pub fn from_samples(samples: &[f64], z: f64) -> Self {
        assert!(samples.len() >= 2, "need at least two samples");
        let n = samples.len() as f64;
        let mean = pairwise_sum(samples) / n;
        let squares: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&squares) / (n - 1.0);
        let std_error = (var / n).sqrt();
        EstimateCI {
            mean,
            std_error,
            trials: samples.len() as u64,
            ci_low: mean - z * std_error,
            ci_high: mean + z * std_error,
        }
    }

    pub fn overlaps(&self, other: &EstimateCI) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }

    /// `|mean - target| <= k * std_error`.
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }
}

/// Pairwise (cascade) summation over a fixed order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let (a, b) = xs.split_at(xs.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Runs `f` for trials `0..trials` in parallel, returning results in order.
pub fn run_trials<R, F>(trials: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64) -> R + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}
