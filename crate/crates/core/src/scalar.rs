//! Scalar abstraction shared by the floating-point and exact pipelines.
//!
//! Everything in [`crate::transport`] is written once against [`Scalar`] and
//! instantiated with `f64` for simulation and [`crate::Rational`] for exact
//! enumeration. Comparisons are plain `PartialOrd`, so record membership is
//! decided by exact `<=` in both pipelines.

use std::fmt::{Debug, Display};

use num_traits::{Num, Signed, ToPrimitive};

/// An ordered field element usable as an increment or partial sum.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + ToPrimitive + Send + Sync + 'static
{
    /// Lossy conversion used for reporting and for mixing exact and float runs.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + PartialOrd + Num + Signed + ToPrimitive + Send + Sync + 'static
{
}

/// `max` for partially ordered values; ties and incomparable pairs return `a`.
pub(crate) fn max_of<T: Scalar>(a: &T, b: &T) -> T {
    if b > a {
        b.clone()
    } else {
        a.clone()
    }
}

/// `min` for partially ordered values; ties and incomparable pairs return `a`.
pub(crate) fn min_of<T: Scalar>(a: &T, b: &T) -> T {
    if b < a {
        b.clone()
    } else {
        a.clone()
    }
}
