//! Split-merge interval fragmentation ("fragmentation with erasure").
//!
//! At every step each subinterval of a partition receives one new interior
//! point, and the previous break points are then forgotten:
//!
//! ```text
//! a[n][k] = p[n][k] * a[n-1][k-1] + (1 - p[n][k]) * a[n-1][k],   k = 1..=n
//! ```
//!
//! while the two end points follow a prescribed (possibly random) boundary.
//! This crate holds the exact recursions, the Markov-chain representation of
//! the normalized break points, the closed-form limit laws, and the point
//! process chains on the real line, together with the statistical machinery
//! (closed-form laws, Kolmogorov-Smirnov tests, moment checks) used to verify
//! them by seeded Monte Carlo.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, the command line or threads lives in the `fraglab` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod error;
pub mod exec;
pub mod gamma;
pub mod genfun;
pub mod limit;
pub mod line;
pub mod markov;
pub mod partition;
pub mod report;
pub mod rng;
pub mod split;
pub mod stats;

pub use boundary::{Boundary, BoundaryKind, BoundarySpec, BoundaryTable, Regime};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use limit::LimitLaw;
pub use partition::{BreakPoints, EmpiricalMeasure};
pub use report::{Check, Report};
pub use rng::{RngStream, Substream};
pub use split::{Proportions, SplitLaw, SplitSpec};
