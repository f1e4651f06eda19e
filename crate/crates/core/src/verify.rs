//! Expectation-level checks of the transport construction.
//!
//! The central identity is `E[M(0, n)] = E[M(-n, 0)]` for every `n >= 1`,
//! which holds for any stationary law because both sides are the same
//! functional of a shifted window. Both sides are local: `M(0, n)` reads only
//! `X_1..X_n` and `M(-n, 0)` reads only `X_{-n+1}..X_0`, so windows `[0, n]`
//! and `[-n, 0]` give them without truncation error.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::processes::{Process, ProcessSpec, DEFAULT_ATOM_CAP};
use crate::rational::format_rational;
use crate::rng::derive_seed;
use crate::stats::{run_trials, EstimateCI, DEFAULT_Z};
use crate::transport::mass_row;
use crate::window::PathWindow;
use crate::{Rational, Scalar};

/// Largest horizon accepted by the exact routines unless configured otherwise.
pub const DEFAULT_HORIZON_CAP: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactConfig {
    pub horizon_cap: u64,
    pub atom_cap: u128,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            horizon_cap: DEFAULT_HORIZON_CAP,
            atom_cap: DEFAULT_ATOM_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Normal quantile for the reported intervals.
    pub z: f64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed,
            z: DEFAULT_Z,
        }
    }

    fn check(&self) -> Result<()> {
        if self.trials < 2 {
            return Err(Error::InvalidArgument("Monte Carlo needs at least 2 trials".into()));
        }
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(Error::InvalidArgument("z must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Mc,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Mc => "mc",
        }
    }
}

/// One side of a checked identity.
#[derive(Clone, Debug, PartialEq)]
pub enum Side {
    Exact(Rational),
    Mc(EstimateCI),
}

impl Side {
    pub fn point(&self) -> f64 {
        match self {
            Side::Exact(r) => r.to_f64_lossy(),
            Side::Mc(e) => e.mean,
        }
    }
}

impl Serialize for Side {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Side::Exact(r) => s.serialize_str(&format_rational(r)),
            Side::Mc(e) => e.serialize(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub n: u64,
    pub mode: Mode,
    /// `E[M(0, n)]`.
    pub lhs: Side,
    /// `E[M(-n, 0)]`.
    pub rhs: Side,
    pub pass: bool,
}

/// Per-`n` terms of the mass transport identity.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Running sums of the point values of both sides, per mode, in row order.
    /// Display only; the per-`n` rows carry the checks.
    pub fn cumulative(&self) -> Vec<(u64, Mode, f64, f64)> {
        let mut out = Vec::with_capacity(self.rows.len());
        let (mut exact, mut mc) = ((0.0, 0.0), (0.0, 0.0));
        for row in &self.rows {
            let acc = match row.mode {
                Mode::Exact => &mut exact,
                Mode::Mc => &mut mc,
            };
            acc.0 += row.lhs.point();
            acc.1 += row.rhs.point();
            out.push((row.n, row.mode, acc.0, acc.1));
        }
        out
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.rows.extend(other.rows);
    }
}

fn require_finite(process: &Process) -> Result<()> {
    if process.is_finite_support() {
        Ok(())
    } else {
        Err(Error::UnsupportedProcess(format!(
            "exact mode needs finite support; {} has continuous support",
            process.spec().kind_name()
        )))
    }
}

fn check_horizon(n: u64, cfg: &ExactConfig) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    if n > cfg.horizon_cap {
        return Err(Error::InvalidArgument(format!(
            "horizon {n} exceeds the exact-mode cap of {}",
            cfg.horizon_cap
        )));
    }
    Ok(())
}

/// `M(0, n)` on a window containing `[0, n]`.
fn sent_to<T: Scalar>(w: &PathWindow<T>, n: i64) -> T {
    mass_row(w, 0).expect("0 < hi").get(n)
}

/// `M(-n, 0)` on a window containing `[-n, 0]`, straight from the definition.
fn received_from<T: Scalar>(w: &PathWindow<T>, n: i64) -> T {
    mass_row(w, -n).expect("lo <= -n < 0").get(0)
}

/// `(E[M(0, n)], E[M(-n, 0)])` by exact enumeration.
pub fn exact_identity(process: &Process, n: u64, cfg: &ExactConfig) -> Result<(Rational, Rational)> {
    require_finite(process)?;
    check_horizon(n, cfg)?;
    let n = n as i64;
    let right = process.exact_window_distribution_capped(0, n, cfg.atom_cap)?;
    let left = process.exact_window_distribution_capped(-n, 0, cfg.atom_cap)?;
    let lhs = right.expectation(|w| sent_to(w, n));
    let rhs = left.expectation(|w| received_from(w, n));
    Ok((lhs, rhs))
}

/// Exact identity rows for `n = 1..=horizon`; a row passes iff both sides
/// are equal.
pub fn exact_identity_report(process: &Process, horizon: u64, cfg: &ExactConfig) -> Result<IdentityReport> {
    check_horizon(horizon, cfg)?;
    let rows = (1..=horizon)
        .map(|n| {
            let (lhs, rhs) = exact_identity(process, n, cfg)?;
            Ok(IdentityRow {
                n,
                mode: Mode::Exact,
                pass: lhs == rhs,
                lhs: Side::Exact(lhs),
                rhs: Side::Exact(rhs),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentityReport { rows })
}

/// Monte Carlo identity rows for `n = 1..=horizon`; a row passes iff the two
/// intervals overlap.
///
/// Each trial samples an independent window `[0, horizon]` for the sent side
/// and `[-horizon, 0]` for the received side. By locality these give every
/// `n <= horizon` exactly as the shorter windows would.
pub fn mc_identity(process: &Process, horizon: u64, cfg: &McConfig) -> Result<IdentityReport> {
    cfg.check()?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let h = horizon as i64;
    let (seed_lhs, seed_rhs) = (derive_seed(cfg.seed, 1), derive_seed(cfg.seed, 2));
    let per_trial = run_trials(cfg.trials, |t| {
        let right = process.sample_window(0, h, seed_lhs, t).expect("valid window");
        let left = process.sample_window(-h, 0, seed_rhs, t).expect("valid window");
        let row = mass_row(&right, 0).expect("0 < hi");
        let sent: Vec<f64> = (1..=h).map(|n| row.get(n)).collect();
        let received: Vec<f64> = (1..=h).map(|n| received_from(&left, n)).collect();
        (sent, received)
    });
    let rows = (0..horizon as usize)
        .map(|i| {
            let lhs: Vec<f64> = per_trial.iter().map(|(s, _)| s[i]).collect();
            let rhs: Vec<f64> = per_trial.iter().map(|(_, r)| r[i]).collect();
            let lhs = EstimateCI::from_samples(&lhs, cfg.z);
            let rhs = EstimateCI::from_samples(&rhs, cfg.z);
            IdentityRow {
                n: i as u64 + 1,
                mode: Mode::Mc,
                pass: lhs.overlaps(&rhs),
                lhs: Side::Mc(lhs),
                rhs: Side::Mc(rhs),
            }
        })
        .collect();
    Ok(IdentityReport { rows })
}

/// `X_1` on the event `min_{1<=n<=N} S_n <= 0`, else zero.
fn maximal_integrand<T: Scalar>(w: &PathWindow<T>, big_n: i64) -> T {
    if (1..=big_n).any(|n| *w.s(n) <= T::zero()) {
        w.x(1).clone()
    } else {
        T::zero()
    }
}

/// Exact `E[X_1; S_n <= 0 for some 1 <= n <= N]`.
pub fn exact_maximal_ergodic(process: &Process, big_n: u64, cfg: &ExactConfig) -> Result<Rational> {
    require_finite(process)?;
    check_horizon(big_n, cfg)?;
    let dist = process.exact_window_distribution_capped(0, big_n as i64, cfg.atom_cap)?;
    Ok(dist.expectation(|w| maximal_integrand(w, big_n as i64)))
}

/// Monte Carlo estimate of `E[X_1; S_n <= 0 for some 1 <= n <= N]`.
pub fn mc_maximal_ergodic(process: &Process, big_n: u64, cfg: &McConfig) -> Result<EstimateCI> {
    Ok(mc_maximal_ergodic_profile(process, big_n, cfg)?
        .pop()
        .expect("big_n >= 1"))
}

/// Estimates for every `N` in `1..=big_n` from one set of paths.
pub fn mc_maximal_ergodic_profile(process: &Process, big_n: u64, cfg: &McConfig) -> Result<Vec<EstimateCI>> {
    cfg.check()?;
    if big_n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let per_trial = run_trials(cfg.trials, |t| {
        let mut xs = Vec::with_capacity(big_n as usize);
        process.fill_increments(0, big_n as i64, cfg.seed, t, &mut xs);
        let mut s = 0.0;
        let mut hit = false;
        xs.iter()
            .map(|x| {
                s += x;
                hit |= s <= 0.0;
                if hit {
                    xs[0]
                } else {
                    0.0
                }
            })
            .collect::<Vec<f64>>()
    });
    Ok((0..big_n as usize)
        .map(|i| {
            let col: Vec<f64> = per_trial.iter().map(|v| v[i]).collect();
            EstimateCI::from_samples(&col, cfg.z)
        })
        .collect())
}

/// Exact `P(S_n > 0 for all 1 <= n <= N)`.
pub fn exact_survival(process: &Process, big_n: u64, cfg: &ExactConfig) -> Result<Rational> {
    require_finite(process)?;
    check_horizon(big_n, cfg)?;
    let dist = process.exact_window_distribution_capped(0, big_n as i64, cfg.atom_cap)?;
    Ok(dist.expectation(|w| {
        if (1..=w.hi()).all(|n| w.s(n).is_positive()) {
            Rational::one()
        } else {
            Rational::zero()
        }
    }))
}

/// Monte Carlo estimate of `P(S_n > 0 for all 1 <= n <= N)`. The finite
/// horizon over-estimates the infinite-horizon survival probability; see
/// [`survival_tail_bound`].
pub fn mc_survival(process: &Process, big_n: u64, cfg: &McConfig) -> Result<EstimateCI> {
    cfg.check()?;
    if big_n == 0 {
        return Err(Error::InvalidArgument("N must be positive".into()));
    }
    let hits = run_trials(cfg.trials, |t| {
        let mut xs = Vec::with_capacity(big_n as usize);
        process.fill_increments(0, big_n as i64, cfg.seed, t, &mut xs);
        let mut s = 0.0;
        for x in xs {
            s += x;
            if s <= 0.0 {
                return 0.0;
            }
        }
        1.0
    });
    Ok(EstimateCI::from_samples(&hits, cfg.z))
}

/// Upper bound on `P(N < ruin time < infinity)` for i.i.d. finite-support
/// processes with positive mean:
///
/// ```text
/// sum_{n>N} P(S_n <= 0) <= sum_{n>N} rho^n = rho^(N+1) / (1 - rho),
/// rho = min_{theta>=0} E[exp(-theta X)]
/// ```
///
/// This is the largest amount by which the finite-horizon survival estimate
/// can exceed the infinite-horizon probability. `None` for other processes.
pub fn survival_tail_bound(process: &Process, big_n: u64) -> Option<f64> {
    if !matches!(process.spec(), ProcessSpec::IidDiscrete { .. }) {
        return None;
    }
    let step = process.exact_window_distribution(0, 1).ok()?;
    let law: Vec<(f64, f64)> = step
        .atoms
        .iter()
        .map(|(w, p)| (w.x(1).to_f64_lossy(), p.to_f64().unwrap_or(0.0)))
        .collect();
    let mean: f64 = law.iter().map(|(x, p)| x * p).sum();
    if mean <= 0.0 {
        return None;
    }
    if law.iter().all(|(x, _)| *x > 0.0) {
        return Some(0.0);
    }
    let mgf = |theta: f64| law.iter().map(|(x, p)| p * (-theta * x).exp()).sum::<f64>();
    let slope = |theta: f64| -law.iter().map(|(x, p)| p * x * (-theta * x).exp()).sum::<f64>();
    // mgf is convex with negative slope at 0; bracket and bisect its minimum.
    let mut hi = 1.0;
    while slope(hi) < 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = mgf(0.5 * (lo + hi)).min(1.0);
    if rho >= 1.0 {
        return None;
    }
    Some((rho.powf(big_n as f64 + 1.0) / (1.0 - rho)).min(1.0))
}
