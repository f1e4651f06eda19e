//! Stationary-process generators.
//!
//! Each generator produces windows of a two-sided stationary sequence
//! directly: i.i.d. kinds draw every index independently, Markov chains start
//! from their stationary law at the left edge, moving averages draw
//! innovations from `lo - q` onward, and rotations draw one uniform phase.
//! Finite-support kinds can also be enumerated exactly.

mod exact;
mod process;
mod spec;
mod stationary;

pub use exact::ExactDistribution;
pub use process::{make_process, ComponentMean, Process, DEFAULT_ATOM_CAP, DEFAULT_ROTATION_ALPHA};
pub use spec::{MixtureComponent, Piece, ProcessSpec, SupportPoint};
pub use stationary::stationary_distribution;
