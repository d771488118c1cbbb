//! Sources of splitting proportions `p[n][k]`, `1 <= k <= n`.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngStream, SampleRng, Substream};
use crate::stats::dist::{BetaPow, ClosedFormDist};

/// Law of a random proportion on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum SplitLaw {
    Uniform,
    /// β(a, 1), CDF `x^a`.
    PowerRight {
        a: f64,
    },
    /// β(1, b), CDF `1 - (1 - x)^b`.
    PowerLeft {
        b: f64,
    },
    /// `hi` with probability `w`, else `lo`.
    TwoPoint {
        lo: f64,
        hi: f64,
        w: f64,
    },
}

impl SplitLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SplitLaw::Uniform => Ok(()),
            SplitLaw::PowerRight { a: s } | SplitLaw::PowerLeft { b: s } => {
                if s > 0.0 && s.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("shape", s, "must be positive and finite"))
                }
            }
            SplitLaw::TwoPoint { lo, hi, w } => {
                for (name, v) in [("lo", lo), ("hi", hi), ("w", w)] {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::param(name, v, "must lie in [0, 1]"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn dist(&self) -> ClosedFormDist {
        match *self {
            SplitLaw::Uniform => ClosedFormDist::Uniform01,
            SplitLaw::PowerRight { a } => ClosedFormDist::BetaPow {
                shape: BetaPow::Right(a),
                lo: 0.0,
                hi: 1.0,
            },
            SplitLaw::PowerLeft { b } => ClosedFormDist::BetaPow {
                shape: BetaPow::Left(b),
                lo: 0.0,
                hi: 1.0,
            },
            SplitLaw::TwoPoint { lo, hi, w } => ClosedFormDist::mixture(alloc::vec![
                (1.0 - w, ClosedFormDist::Dirac(lo)),
                (w, ClosedFormDist::Dirac(hi))
            ])
            .unwrap_or(ClosedFormDist::Dirac(lo)),
        }
    }

    pub fn mean(&self) -> f64 {
        self.dist().mean()
    }
}

/// A deterministic proportion array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proportions {
    /// `p[n][k] = p` for all `n, k`.
    Constant(f64),
    /// `p[n][k] = seq[n - 1]`; one proportion per step.
    Stratified(Vec<f64>),
    /// `p[n][k] = rows[n - 1][k - 1]`; row `n - 1` has length `n`.
    Array(Vec<Vec<f64>>),
}

impl Proportions {
    /// `p[n][k]` for `n >= 1`, `1 <= k <= n`.
    pub fn get(&self, n: usize, k: usize) -> Result<f64> {
        match self {
            Proportions::Constant(p) => Ok(*p),
            Proportions::Stratified(seq) => seq.get(n - 1).copied().ok_or(Error::ProportionsExhausted {
                step: n,
                last: seq.len(),
            }),
            Proportions::Array(rows) => rows
                .get(n - 1)
                .ok_or(Error::ProportionsExhausted {
                    step: n,
                    last: rows.len(),
                })?
                .get(k - 1)
                .copied()
                .ok_or(Error::DimensionMismatch {
                    step: n,
                    expected: n,
                    got: rows[n - 1].len(),
                }),
        }
    }

    /// Writes `p[n][1..=n]` into `out`.
    pub fn fill_row(&self, n: usize, out: &mut Vec<f64>) -> Result<()> {
        out.clear();
        match self {
            Proportions::Constant(p) => out.resize(n, *p),
            Proportions::Stratified(_) => {
                let p = self.get(n, 1)?;
                out.resize(n, p);
            }
            Proportions::Array(rows) => {
                let row = rows.get(n - 1).ok_or(Error::ProportionsExhausted {
                    step: n,
                    last: rows.len(),
                })?;
                if row.len() != n {
                    return Err(Error::DimensionMismatch {
                        step: n,
                        expected: n,
                        got: row.len(),
                    });
                }
                out.extend_from_slice(row);
            }
        }
        Ok(())
    }

    /// Cesàro mean of the proportions supplied.
    pub fn mean(&self) -> f64 {
        match self {
            Proportions::Constant(p) => *p,
            Proportions::Stratified(seq) => seq.iter().sum::<f64>() / seq.len().max(1) as f64,
            Proportions::Array(rows) => {
                let count: usize = rows.iter().map(Vec::len).sum();
                rows.iter().flatten().sum::<f64>() / count.max(1) as f64
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let check = |n: usize, k: usize, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::ProportionOutOfRange {
                    step: n,
                    index: k,
                    value: v,
                })
            }
        };
        match self {
            Proportions::Constant(p) => check(0, 0, *p),
            Proportions::Stratified(seq) => seq.iter().enumerate().try_for_each(|(i, &v)| check(i + 1, 0, v)),
            Proportions::Array(rows) => rows
                .iter()
                .enumerate()
                .try_for_each(|(i, row)| row.iter().enumerate().try_for_each(|(k, &v)| check(i + 1, k + 1, v))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "source", rename_all = "snake_case")]
pub enum SplitSpec {
    /// Fixed proportions.
    Deterministic(Proportions),
    /// One random proportion per step, shared by all intervals.
    RandomStratified(SplitLaw),
    /// I.i.d. proportions for every interval and step.
    FullyRandom(SplitLaw),
}

impl SplitSpec {
    pub fn constant(p: f64) -> Result<Self> {
        let spec = SplitSpec::Deterministic(Proportions::Constant(p));
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SplitSpec::Deterministic(p) => p.validate(),
            SplitSpec::RandomStratified(law) | SplitSpec::FullyRandom(law) => law.validate(),
        }
    }

    pub fn is_random(&self) -> bool {
        !matches!(self, SplitSpec::Deterministic(_))
    }

    /// `p̄`.
    pub fn mean(&self) -> f64 {
        match self {
            SplitSpec::Deterministic(p) => p.mean(),
            SplitSpec::RandomStratified(law) | SplitSpec::FullyRandom(law) => law.mean(),
        }
    }

    /// Streaming rows; random specs draw from the `Proportions` substream of `stream`.
    pub fn stream(&self, stream: Option<RngStream>) -> Result<ProportionStream> {
        self.validate()?;
        let rng = if self.is_random() {
            Some(stream.ok_or(Error::MissingSeed)?.rng(Substream::Proportions))
        } else {
            None
        };
        let dist = match self {
            SplitSpec::RandomStratified(law) | SplitSpec::FullyRandom(law) => Some(law.dist()),
            SplitSpec::Deterministic(_) => None,
        };
        Ok(ProportionStream {
            spec: self.clone(),
            dist,
            rng,
            next: 1,
        })
    }

    /// Materializes rows `1..=n_max` with exactly the draws [`SplitSpec::stream`] produces.
    pub fn realize(&self, n_max: usize, stream: Option<RngStream>) -> Result<Proportions> {
        match self {
            SplitSpec::Deterministic(p) => {
                self.validate()?;
                Ok(p.clone())
            }
            SplitSpec::RandomStratified(_) => {
                let mut s = self.stream(stream)?;
                let mut row = Vec::new();
                let mut seq = Vec::with_capacity(n_max);
                for n in 1..=n_max {
                    s.fill_row(n, &mut row)?;
                    seq.push(row[0]);
                }
                Ok(Proportions::Stratified(seq))
            }
            SplitSpec::FullyRandom(_) => {
                let mut s = self.stream(stream)?;
                let mut rows = Vec::with_capacity(n_max);
                for n in 1..=n_max {
                    let mut row = Vec::with_capacity(n);
                    s.fill_row(n, &mut row)?;
                    rows.push(row);
                }
                Ok(Proportions::Array(rows))
            }
        }
    }
}

/// Produces rows `p[n][1..=n]` in order `n = 1, 2, ...`.
#[derive(Debug, Clone)]
pub struct ProportionStream {
    spec: SplitSpec,
    dist: Option<ClosedFormDist>,
    rng: Option<SampleRng>,
    next: usize,
}

impl ProportionStream {
    pub fn fill_row(&mut self, n: usize, out: &mut Vec<f64>) -> Result<()> {
        if n != self.next {
            return Err(Error::Precondition(alloc::format!(
                "proportion rows must be requested in order: expected step {}, got {n}",
                self.next
            )));
        }
        self.next += 1;
        match (&self.spec, &self.dist, &mut self.rng) {
            (SplitSpec::Deterministic(p), _, _) => p.fill_row(n, out),
            (SplitSpec::RandomStratified(_), Some(d), Some(rng)) => {
                let p = d.sample(rng);
                out.clear();
                out.resize(n, p);
                Ok(())
            }
            (SplitSpec::FullyRandom(_), Some(d), Some(rng)) => {
                out.clear();
                out.extend((0..n).map(|_| d.sample(rng)));
                Ok(())
            }
            _ => Err(Error::MissingSeed),
        }
    }
}
