//! Closed-form laws, Kolmogorov-Smirnov tests and moment checks.

pub mod dist;
pub mod ks;
pub mod moments;

pub use dist::{BetaPow, Cdf, ClosedFormDist, FnCdf};
pub use ks::{KsOutcome, ks_distance, ks_one_sample, ks_two_sample};
pub use moments::{MomentCheck, MomentTargets, moment_report};
