//! Limit laws of the normalized empirical measure `g_n`.
//!
//! For a boundary with growth index `c`, right share `q` and mean proportion
//! `p̄`:
//!
//! * `0 < c < inf`: `p̄ β(1, 1/c)` rescaled to `[0, 1-q]` plus
//!   `(1-p̄) β(1/c, 1)` rescaled to `[1-q, 1]`;
//! * `c = 0`: `p̄ δ_0 + (1-p̄) δ_1`;
//! * `c = inf`: `δ_{1-q}`.
//!
//! A beta law on a degenerate interval `[a, a]` is the point mass at `a`, and
//! components of zero weight are dropped.

use alloc::format;
use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundarySpec, Regime};
use crate::error::{Error, Result};
use crate::markov::AlphaRows;
use crate::partition::EmpiricalMeasure;
use crate::report::{Check, Report};
use crate::rng::RngStream;
use crate::split::SplitSpec;
use crate::stats::dist::{BetaPow, Cdf, ClosedFormDist};
use crate::stats::ks::ks_distance;

/// KS pass threshold for regular regimes. No convergence rate is known, so
/// this is a fixed tolerance, complemented by a decreasing-discrepancy check.
pub const REGULAR_KS_THRESHOLD: f64 = 0.05;
/// Slow regimes: minimum mass within 0.05 of `{0, 1}`.
pub const SLOW_EDGE_MASS: f64 = 0.95;
/// Fast regimes: median within this distance of `1 - q`.
pub const FAST_MEDIAN_TOLERANCE: f64 = 0.05;
/// Fast regimes: largest interquartile range.
pub const FAST_IQR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum LimitLaw {
    Regular { c: f64, q: f64, pbar: f64 },
    Slow { pbar: f64 },
    Fast { q: f64 },
}

impl LimitLaw {
    pub fn new(regime: Regime, q: f64, pbar: f64) -> Result<Self> {
        let law = match regime {
            Regime::Regular(c) => LimitLaw::Regular { c, q, pbar },
            Regime::Slow => LimitLaw::Slow { pbar },
            Regime::Fast => LimitLaw::Fast { q },
        };
        law.validate()?;
        Ok(law)
    }

    fn validate(&self) -> Result<()> {
        let unit = |name, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::param(name, v, "must lie in [0, 1]"))
            }
        };
        match *self {
            LimitLaw::Regular { c, q, pbar } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::param("c", c, "must be positive and finite"));
                }
                unit("q", q)?;
                unit("pbar", pbar)
            }
            LimitLaw::Slow { pbar } => unit("pbar", pbar),
            LimitLaw::Fast { q } => unit("q", q),
        }
    }

    /// The law as a mixture of closed-form components.
    pub fn dist(&self) -> ClosedFormDist {
        let parts = match *self {
            LimitLaw::Regular { c, q, pbar } => alloc::vec![
                (
                    pbar,
                    ClosedFormDist::BetaPow {
                        shape: BetaPow::Left(1.0 / c),
                        lo: 0.0,
                        hi: 1.0 - q
                    }
                ),
                (
                    1.0 - pbar,
                    ClosedFormDist::BetaPow {
                        shape: BetaPow::Right(1.0 / c),
                        lo: 1.0 - q,
                        hi: 1.0
                    }
                ),
            ],
            LimitLaw::Slow { pbar } => alloc::vec![
                (pbar, ClosedFormDist::Dirac(0.0)),
                (1.0 - pbar, ClosedFormDist::Dirac(1.0))
            ],
            LimitLaw::Fast { q } => alloc::vec![(1.0, ClosedFormDist::Dirac(1.0 - q))],
        };
        ClosedFormDist::mixture(parts).unwrap_or(ClosedFormDist::Dirac(0.0))
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, LimitLaw::Regular { .. })
    }
}

impl Cdf for LimitLaw {
    fn cdf(&self, t: f64) -> f64 {
        self.dist().cdf(t)
    }
    fn cdf_left(&self, t: f64) -> f64 {
        self.dist().cdf_left(t)
    }
}

/// Right-continuous CDF of the limit law on `[0, 1]`.
pub fn limit_cdf(law: &LimitLaw, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::param("t", t, "must lie in [0, 1]"));
    }
    law.validate()?;
    Ok(law.dist().cdf(t))
}

/// CDF of the limit of `x_n / n`: `(1-q) β(1, c)` on `[0, p̄]` plus `q β(c, 1)` on `[p̄, 1]`.
fn chain_position_cdf(c: f64, q: f64, pbar: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x <= pbar {
        (1.0 - q) * (1.0 - (1.0 - x / pbar).powf(c))
    } else if x < 1.0 {
        (1.0 - q) + q * ((x - pbar) / (1.0 - pbar)).powf(c)
    } else {
        1.0
    }
}

/// `sup { x in [0, 1] : F(x) <= t }` by bisection.
fn right_quantile(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if f(hi) <= t {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) <= t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Builds the `x_n / n` limit `F`, inverts it numerically and returns
/// `sup_t |Q(t) - limit_cdf(t)|` over `grid`. The two descriptions of the
/// limit agree exactly when this gap is rounding noise.
pub fn quantile_consistency(c: f64, q: f64, pbar: f64, grid: &[f64]) -> Result<f64> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::param("c", c, "must be positive and finite"));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::param("q", q, "must lie in (0, 1)"));
    }
    if !(pbar > 0.0 && pbar < 1.0) {
        return Err(Error::param("pbar", pbar, "must lie in (0, 1)"));
    }
    let law = LimitLaw::Regular { c, q, pbar };
    let mut gap = 0.0f64;
    for &t in grid {
        let quantile = right_quantile(|x| chain_position_cdf(c, q, pbar, x), t);
        gap = gap.max((quantile - limit_cdf(&law, t)?).abs());
    }
    Ok(gap)
}

/// Midpoint grid `(i - 1/2) / m`, `i = 1..=m`.
pub fn midpoint_grid(m: usize) -> Vec<f64> {
    (1..=m).map(|i| (i as f64 - 0.5) / m as f64).collect()
}

/// `sup_t |g(t) - limit_cdf(t)|` for an empirical measure.
pub fn limit_distance(measure: &EmpiricalMeasure, law: &LimitLaw) -> Result<f64> {
    if measure.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(ks_distance(&measure.sorted(), &law.dist()))
}

fn quantile_of_sorted(sorted: &[f64], u: f64) -> f64 {
    let idx = ((u * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}

/// Verdict of `measure` against `law`.
///
/// Regular laws use the KS distance with [`REGULAR_KS_THRESHOLD`]; point-mass
/// laws switch to concentration statistics: mass near `{0, 1}` for the slow
/// regime, median and interquartile range for the fast regime.
pub fn ks_against_limit(measure: &EmpiricalMeasure, law: &LimitLaw, label: &str) -> Result<Report> {
    if measure.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = measure.len();
    let mut report = Report::new();
    match *law {
        LimitLaw::Regular { .. } => {
            let d = limit_distance(measure, law)?;
            report.push(Check::below(format!("ks_limit_{label}"), n, 1, d, REGULAR_KS_THRESHOLD));
        }
        LimitLaw::Slow { .. } => {
            let mass = measure.mass_in(0.0, 0.05) + measure.mass_in(0.95, 1.0);
            report.push(Check::at_least(
                format!("limit_edge_mass_{label}"),
                n,
                1,
                mass,
                SLOW_EDGE_MASS,
            ));
        }
        LimitLaw::Fast { q } => {
            let sorted = measure.sorted();
            let median = quantile_of_sorted(&sorted, 0.5);
            let iqr = quantile_of_sorted(&sorted, 0.75) - quantile_of_sorted(&sorted, 0.25);
            report.push(Check::at_most(
                format!("limit_median_offset_{label}"),
                n,
                1,
                (median - (1.0 - q)).abs(),
                FAST_MEDIAN_TOLERANCE,
            ));
            report.push(Check::at_most(format!("limit_iqr_{label}"), n, 1, iqr, FAST_IQR));
        }
    }
    Ok(report)
}

/// Normalized break points `g_n` at each requested `n` (ascending), for one
/// seeded realization, computed by the alpha recursion so that fast-growing
/// boundaries never materialize their raw lengths.
pub fn empirical_measures(
    boundary: &BoundarySpec,
    split: &SplitSpec,
    ns: &[usize],
    seed: Option<u64>,
) -> Result<Vec<EmpiricalMeasure>> {
    let n_max = ns.iter().copied().max().unwrap_or(0);
    let stream = seed.map(|s| RngStream::new(s, 0));
    let realized = boundary.realize(n_max, stream)?;
    let mut proportions = split.stream(stream)?;
    let mut rows = AlphaRows::new(&realized);
    let mut p = Vec::new();
    let mut out = Vec::with_capacity(ns.len());
    let mut targets: Vec<usize> = ns.to_vec();
    targets.sort_unstable();
    for &n in &targets {
        while rows.n() < n {
            proportions.fill_row(rows.n() + 1, &mut p)?;
            rows.step_with(&p)?;
        }
        out.push(EmpiricalMeasure::new(rows.atoms().to_vec()));
    }
    Ok(out)
}

/// The full limit experiment: `g_n` at every `n` in `ns` against the limit law
/// implied by the boundary regime, `q` and `p̄`. Regular regimes with several
/// `n` also check that the KS distance at the largest `n` is below the one at
/// the smallest.
pub fn limit_test(
    boundary: &BoundarySpec,
    split: &SplitSpec,
    ns: &[usize],
    seed: Option<u64>,
) -> Result<(LimitLaw, Vec<EmpiricalMeasure>, Report)> {
    let regime = boundary.regime().ok_or(Error::UnknownRegime)?;
    let law = LimitLaw::new(regime, boundary.q(), split.mean())?;
    let mut targets = ns.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if targets.first() == Some(&0) {
        return Err(Error::param("n", 0.0, "must be positive"));
    }
    let measures = empirical_measures(boundary, split, &targets, seed)?;
    let mut report = Report::new();
    let mut distances = Vec::new();
    for (m, &n) in measures.iter().zip(&targets) {
        report.extend(ks_against_limit(m, &law, &format!("n{n}"))?);
        distances.push(limit_distance(m, &law)?);
    }
    if law.is_continuous() && targets.len() >= 2 {
        let (first, last) = (distances[0], distances[distances.len() - 1]);
        report.push(Check::below(
            "limit_ks_decreasing",
            targets[targets.len() - 1],
            1,
            last,
            first,
        ));
    }
    Ok((law, measures, report.finish()))
}
