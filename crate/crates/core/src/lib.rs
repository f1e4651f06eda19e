//! Mass transport on stationary sequences.
//!
//! The library computes, on finite windows of a two-sided stationary
//! sequence `X`, the records after each index, the ladder epochs before zero
//! and the mass function `M(n, m)` that a positive step sends along its
//! subsequent records. It then checks the expectation-level consequences two
//! ways: exact enumeration in rational arithmetic for finite-support
//! processes, and seeded Monte Carlo with confidence intervals for all of
//! them.
//!
//! The path-level code in [`transport`] is generic over [`Scalar`]; the
//! aliases below fix it to the two pipelines in use.

pub mod birkhoff;
pub mod error;
pub mod processes;
pub mod rational;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod transport;
pub mod verify;
pub mod window;

pub use error::{Error, Result};
pub use processes::{make_process, ExactDistribution, Process, ProcessSpec};
pub use rational::{format_rational, parse_rational, ratio};
pub use scalar::Scalar;
pub use stats::EstimateCI;
pub use window::PathWindow;

/// Exact scalar for enumeration-based checks.
pub type Rational = num_rational::BigRational;

/// Window of sampled increments.
pub type FloatWindow = PathWindow<f64>;
/// Window of exactly enumerated increments.
pub type ExactWindow = PathWindow<Rational>;
pub type FloatMassRow = transport::MassRow<f64>;
pub type ExactMassRow = transport::MassRow<Rational>;

/// Tolerance for equality of derived floating-point quantities.
pub const EPSILON: f64 = 1e-9;
