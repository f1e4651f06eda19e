use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::transport::partial_sums;

/// One realized trajectory on the index range `[lo, hi]`.
///
/// Holds the increments `X_{lo+1}..X_hi` (increment `X_k` spans `k-1 -> k`)
/// and the partial sums `S_lo..S_hi` anchored at `S_0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathWindow<T> {
    lo: i64,
    hi: i64,
    values: Vec<T>,
    sums: Vec<T>,
}

impl<T: Scalar> PathWindow<T> {
    /// Builds a window from `X_{lo+1}..X_{lo+values.len()}`.
    pub fn from_increments(lo: i64, values: Vec<T>) -> Result<Self> {
        let hi = lo + values.len() as i64;
        check_bounds(lo, hi)?;
        let sums = partial_sums(lo, &values);
        Ok(PathWindow {
            lo,
            hi,
            values,
            sums,
        })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Increment `X_k` for `lo < k <= hi`.
    pub fn x(&self, k: i64) -> &T {
        assert!(self.lo < k && k <= self.hi, "X_{k} outside ({}, {}]", self.lo, self.hi);
        &self.values[(k - self.lo - 1) as usize]
    }

    /// Partial sum `S_k` for `lo <= k <= hi`.
    pub fn s(&self, k: i64) -> &T {
        assert!(self.lo <= k && k <= self.hi, "S_{k} outside [{}, {}]", self.lo, self.hi);
        &self.sums[(k - self.lo) as usize]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn sums(&self) -> &[T] {
        &self.sums
    }

    /// Sub-window on `[lo, hi]`, re-anchored so that `S_0 = 0` still holds.
    pub fn restrict(&self, lo: i64, hi: i64) -> Result<Self> {
        check_bounds(lo, hi)?;
        if lo < self.lo || hi > self.hi {
            return Err(Error::InvalidWindow(format!(
                "[{lo}, {hi}] not inside [{}, {}]",
                self.lo, self.hi
            )));
        }
        let start = (lo - self.lo) as usize;
        let end = (hi - self.lo) as usize;
        PathWindow::from_increments(lo, self.values[start..end].to_vec())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PathWindow<U> {
        PathWindow::from_increments(self.lo, self.values.iter().map(f).collect())
            .expect("shape already validated")
    }
}

fn check_bounds(lo: i64, hi: i64) -> Result<()> {
    if lo > 0 || hi < 0 {
        return Err(Error::InvalidWindow(format!(
            "need lo <= 0 <= hi, got [{lo}, {hi}]"
        )));
    }
    if hi - lo < 1 {
        return Err(Error::InvalidWindow("window must hold at least one increment".into()));
    }
    Ok(())
}
