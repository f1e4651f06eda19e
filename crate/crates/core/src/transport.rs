//! Records, ladder epochs and the mass function on a single window.
//!
//! A sender `n` with `X_{n+1} > 0` enumerates its records
//! `n+1 = n_0 < n_1 < ...` (indices where `S` attains a non-strict running
//! minimum over `(n, m]`) and sends
//!
//! ```text
//! M(n, n_j) = max{S_{n_{j-1}}, S_n} - max{S_{n_j}, S_n},   j >= 1
//! ```
//!
//! Nothing is sent to `n_0`. Every quantity here is relative to the window
//! `[lo, hi]`: records beyond `hi` are simply not visible yet. `M(0, m)` for
//! `m <= hi` and `M(m, 0)` for `m >= lo` are unaffected by truncation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{max_of, min_of, Scalar};
use crate::window::PathWindow;

/// Records after a sender, in increasing order. `records[0] == sender + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordList {
    pub sender: i64,
    pub records: Vec<i64>,
}

/// Strict left-to-right minima of `S` scanning leftward from `-1`.
/// `epochs[0] == -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderList {
    pub epochs: Vec<i64>,
}

/// Sparse mass sent by one index. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MassRow<T> {
    pub sender: i64,
    pub entries: BTreeMap<i64, T>,
}

impl<T: Scalar> MassRow<T> {
    /// `M(sender, m)`, zero when absent.
    pub fn get(&self, m: i64) -> T {
        self.entries.get(&m).cloned().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.entries.values().fold(T::zero(), |acc, v| acc + v.clone())
    }
}

/// Anchored partial sums `S_lo..S_{lo+len}` for increments `X_{lo+1}..`.
///
/// `S_0 = 0`; sums to the right accumulate forward and sums to the left are
/// recovered backward via `S_{k-1} = S_k - X_k`.
pub fn partial_sums<T: Scalar>(lo: i64, values: &[T]) -> Vec<T> {
    let len = values.len();
    let zero_at = (-lo) as usize;
    let mut sums = vec![T::zero(); len + 1];
    for i in zero_at..len {
        sums[i + 1] = sums[i].clone() + values[i].clone();
    }
    for i in (0..zero_at).rev() {
        sums[i] = sums[i + 1].clone() - values[i].clone();
    }
    sums
}

fn check_sender<T: Scalar>(w: &PathWindow<T>, n: i64) -> Result<()> {
    if n < w.lo() || n >= w.hi() {
        return Err(Error::InvalidWindow(format!(
            "sender {n} needs lo <= n < hi in [{}, {}]",
            w.lo(),
            w.hi()
        )));
    }
    Ok(())
}

fn check_has_past<T: Scalar>(w: &PathWindow<T>) -> Result<()> {
    if w.lo() > -1 {
        return Err(Error::InvalidWindow("need lo <= -1".into()));
    }
    Ok(())
}

/// All `m` in `(n, hi]` with `S_m = min{S_{n+1}, ..., S_m}`.
pub fn records_after<T: Scalar>(w: &PathWindow<T>, n: i64) -> Result<RecordList> {
    check_sender(w, n)?;
    let mut records = vec![n + 1];
    let mut running = w.s(n + 1).clone();
    for m in n + 2..=w.hi() {
        let s = w.s(m);
        if *s <= running {
            records.push(m);
            running = s.clone();
        }
    }
    Ok(RecordList { sender: n, records })
}

/// The mass row of sender `n`; empty when `X_{n+1} <= 0`.
pub fn mass_row<T: Scalar>(w: &PathWindow<T>, n: i64) -> Result<MassRow<T>> {
    check_sender(w, n)?;
    let mut entries = BTreeMap::new();
    if *w.x(n + 1) > T::zero() {
        let base = w.s(n);
        let records = records_after(w, n)?.records;
        for pair in records.windows(2) {
            let sent = max_of(w.s(pair[0]), base) - max_of(w.s(pair[1]), base);
            if !sent.is_zero() {
                entries.insert(pair[1], sent);
            }
        }
    }
    Ok(MassRow { sender: n, entries })
}

/// Closed form of the row total: `S_{n+1} - max{min_{n<k<=hi} S_k, S_n}`
/// when `X_{n+1} > 0`, else zero.
pub fn total_sent<T: Scalar>(w: &PathWindow<T>, n: i64) -> Result<T> {
    check_sender(w, n)?;
    if *w.x(n + 1) <= T::zero() {
        return Ok(T::zero());
    }
    let floor = (n + 1..=w.hi())
        .map(|k| w.s(k))
        .fold(w.s(n + 1).clone(), |acc, s| min_of(&acc, s));
    Ok(w.s(n + 1).clone() - max_of(&floor, w.s(n)))
}

/// `-1` followed by every `m < -1` with `S_m < min{S_{m+1}, ..., S_{-1}}`.
pub fn ladder_epochs_before_zero<T: Scalar>(w: &PathWindow<T>) -> Result<LadderList> {
    check_has_past(w)?;
    let mut epochs = vec![-1];
    let mut running = w.s(-1).clone();
    for m in (w.lo()..-1).rev() {
        let s = w.s(m);
        if *s < running {
            epochs.push(m);
            running = s.clone();
        }
    }
    Ok(LadderList { epochs })
}

/// `m -> M(m, 0)` for `m < 0`, via the ladder-epoch closed form:
/// `M(m_j, 0) = max{S_{m_{j-1}}, 0} - max{S_{m_j}, 0}` for `j >= 1` when
/// `X_0 <= 0`, and nothing otherwise.
pub fn mass_received_at_zero<T: Scalar>(w: &PathWindow<T>) -> Result<BTreeMap<i64, T>> {
    check_has_past(w)?;
    let mut received = BTreeMap::new();
    if *w.x(0) > T::zero() {
        return Ok(received);
    }
    let zero = T::zero();
    let epochs = ladder_epochs_before_zero(w)?.epochs;
    for pair in epochs.windows(2) {
        let mass = max_of(w.s(pair[0]), &zero) - max_of(w.s(pair[1]), &zero);
        if !mass.is_zero() {
            received.insert(pair[1], mass);
        }
    }
    Ok(received)
}

/// Closed form of the total received at zero:
/// `-X_0 - max{min_{lo<=m<=-1} S_m, 0}` when `X_0 <= 0`, else zero.
pub fn total_received_at_zero<T: Scalar>(w: &PathWindow<T>) -> Result<T> {
    check_has_past(w)?;
    let x0 = w.x(0);
    if *x0 > T::zero() {
        return Ok(T::zero());
    }
    let floor = (w.lo()..=-1)
        .map(|m| w.s(m))
        .fold(w.s(-1).clone(), |acc, s| min_of(&acc, s));
    Ok(-x0.clone() - max_of(&floor, &T::zero()))
}

/// Least `n` in `[1, hi]` with `S_n <= 0`.
pub fn first_nonpositive<T: Scalar>(w: &PathWindow<T>) -> Result<Option<i64>> {
    if w.hi() < 1 {
        return Err(Error::InvalidWindow("need hi >= 1".into()));
    }
    Ok((1..=w.hi()).find(|&n| *w.s(n) <= T::zero()))
}
