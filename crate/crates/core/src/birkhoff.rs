//! Ergodic averages `S_n / n` against their limit `E[X_1 | I]`.
//!
//! The limit is known analytically for every supported kind. Mixtures are
//! the only non-ergodic case: their invariant information is the component
//! label, so each trajectory is compared with the mean of the component it
//! was drawn from.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::processes::Process;
use crate::stats::{run_trials, EstimateCI};
use crate::verify::McConfig;
use crate::Rational;

/// Default lower cutoff for the finite-horizon `A_epsilon` surrogate.
pub const DEFAULT_MIN_N: u64 = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentTarget {
    pub id: usize,
    #[serde(serialize_with = "ser_rational")]
    pub weight: Rational,
    pub mean: f64,
}

/// `E[X_1 | I]` as a list of components with their weights and means.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalMeanSpec {
    pub components: Vec<ComponentTarget>,
}

impl ConditionalMeanSpec {
    pub fn target(&self, component: usize) -> f64 {
        self.components[component].mean
    }
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::format_rational(r))
}

pub fn conditional_mean(process: &Process) -> Result<ConditionalMeanSpec> {
    let components = process
        .component_means()
        .into_iter()
        .enumerate()
        .map(|(id, c)| {
            if c.mean.is_finite() {
                Ok(ComponentTarget {
                    id,
                    weight: c.weight,
                    mean: c.mean,
                })
            } else {
                Err(Error::UnsupportedProcess(format!("component {id} has no finite mean")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConditionalMeanSpec { components })
}

/// `1, 2, 4, ...` up to `n_max`, with `n_max` appended if it is not a power of two.
pub fn geometric_grid(n_max: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = std::iter::successors(Some(1u64), |n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect();
    if grid.last() != Some(&n_max) {
        grid.push(n_max);
    }
    grid
}

/// `S_n / n` of one trial on the geometric grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub trial: u64,
    pub component: usize,
    pub target: f64,
    pub averages: Vec<f64>,
    /// `|S_{n_max} / n_max - target|`.
    pub terminal_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryReport {
    pub grid: Vec<u64>,
    pub rows: Vec<TrajectoryRow>,
}

impl TrajectoryReport {
    /// Fraction of trials whose terminal average misses its target by more
    /// than `tolerance`.
    pub fn fraction_deviating(&self, tolerance: f64) -> f64 {
        let bad = self.rows.iter().filter(|r| r.terminal_deviation > tolerance).count();
        bad as f64 / self.rows.len() as f64
    }
}

fn check_n_max(n_max: u64) -> Result<()> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    Ok(())
}

fn trajectory_with(process: &Process, targets: &ConditionalMeanSpec, grid: &[u64], seed: u64, trial: u64) -> TrajectoryRow {
    let n_max = *grid.last().expect("non-empty grid");
    let mut xs = Vec::with_capacity(n_max as usize);
    let component = process.fill_increments(0, n_max as i64, seed, trial, &mut xs);
    let target = targets.target(component);
    let mut averages = Vec::with_capacity(grid.len());
    let mut s = 0.0;
    let mut next = grid.iter().peekable();
    for (i, x) in xs.iter().enumerate() {
        s += x;
        let n = i as u64 + 1;
        if next.peek() == Some(&&n) {
            averages.push(s / n as f64);
            next.next();
        }
    }
    let terminal_deviation = (averages.last().expect("non-empty grid") - target).abs();
    TrajectoryRow {
        trial,
        component,
        target,
        averages,
        terminal_deviation,
    }
}

/// One sampled trajectory. For mixtures the drawn component and its mean are
/// recorded.
pub fn trajectory(process: &Process, n_max: u64, seed: u64, trial: u64) -> Result<TrajectoryRow> {
    check_n_max(n_max)?;
    let targets = conditional_mean(process)?;
    Ok(trajectory_with(process, &targets, &geometric_grid(n_max), seed, trial))
}

/// Trajectories for trials `0..trials`.
pub fn trajectories(process: &Process, n_max: u64, trials: u64, seed: u64) -> Result<TrajectoryReport> {
    check_n_max(n_max)?;
    let targets = conditional_mean(process)?;
    let grid = geometric_grid(n_max);
    let rows = run_trials(trials, |t| trajectory_with(process, &targets, &grid, seed, t));
    Ok(TrajectoryReport { grid, rows })
}

/// Finite-horizon surrogate for `A_epsilon = {liminf S_n/n < E[X_1|I] - epsilon}`.
///
/// A trial counts when the centered average `S_n/n - E[X_1|I]` drops below
/// `-epsilon` for some tested `n`. The tested range is the tail block
/// `[max(min(min_n, n_max), ceil(n_max / 2)), n_max]`, so the surrogate
/// shrinks to zero as `n_max` grows whenever the averages converge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AEpsilon {
    pub epsilon: f64,
    pub n_max: u64,
    pub min_n: u64,
}

impl AEpsilon {
    pub fn new(epsilon: f64, n_max: u64) -> Self {
        AEpsilon {
            epsilon,
            n_max,
            min_n: DEFAULT_MIN_N,
        }
    }

    /// First tested index.
    pub fn first_tested(&self) -> u64 {
        self.min_n.min(self.n_max).max(self.n_max.div_ceil(2))
    }

    fn check(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        check_n_max(self.n_max)
    }
}

/// Estimates the probability of the `A_epsilon` surrogate.
pub fn estimate_a_epsilon(process: &Process, event: &AEpsilon, cfg: &McConfig) -> Result<EstimateCI> {
    estimate_tail_event(process, event, cfg, false)
}

/// The mirror event `limsup S_n/n > E[X_1|I] + epsilon` on the same paths.
/// Equals [`estimate_a_epsilon`] on `process.negated()`.
pub fn estimate_upper_epsilon(process: &Process, event: &AEpsilon, cfg: &McConfig) -> Result<EstimateCI> {
    estimate_tail_event(process, event, cfg, true)
}

fn estimate_tail_event(process: &Process, event: &AEpsilon, cfg: &McConfig, upper: bool) -> Result<EstimateCI> {
    event.check()?;
    if cfg.trials < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least 2 trials".into()));
    }
    let targets = conditional_mean(process)?;
    let first = event.first_tested();
    let hits = run_trials(cfg.trials, |t| {
        let mut xs = Vec::with_capacity(event.n_max as usize);
        let component = process.fill_increments(0, event.n_max as i64, cfg.seed, t, &mut xs);
        let center = targets.target(component);
        let mut s = 0.0;
        for (i, x) in xs.iter().enumerate() {
            s += x;
            let n = i as u64 + 1;
            if n >= first {
                let centered = s / n as f64 - center;
                let out = if upper {
                    centered > event.epsilon
                } else {
                    centered < -event.epsilon
                };
                if out {
                    return 1.0;
                }
            }
        }
        0.0
    });
    Ok(EstimateCI::from_samples(&hits, cfg.z))
}
