//! Boundary sequences `(a[n][0], a[n][n+1])` and their growth regimes.
//!
//! Built-in families split the total length `l_n` as `a[n][0] = -(1-q) l_n`,
//! `a[n][n+1] = q l_n`, so every step attaches the fraction `q` of the growth
//! to the right end.

use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngStream, Substream, exp1};

/// Growth index `c` of `l_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", content = "c", rename_all = "snake_case")]
pub enum Regime {
    /// `c = 0`.
    Slow,
    /// `0 < c < inf`.
    Regular(f64),
    /// `c = inf`.
    Fast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryKind {
    /// `l_n = r`.
    Constant,
    /// `l_n = r ln(n + e)`.
    Logarithmic,
    /// `l_n = r (n + 1)^c`.
    PowerLaw { c: f64 },
    /// `l_n = r e^n`.
    Exponential,
    /// `a[n][0] = -S'_n`, `a[n][n+1] = S_n` for partial sums of unit exponentials.
    PoissonArrivals,
    /// Explicit end points, optionally annotated with a regime.
    Custom {
        table: BoundaryTable,
        #[serde(default)]
        regime: Option<Regime>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    #[serde(flatten)]
    pub kind: BoundaryKind,
    /// Length scale; ignored by `PoissonArrivals` and `Custom`.
    #[serde(default = "one")]
    pub r: f64,
    /// Right share of the growth. `PoissonArrivals` always uses 1/2.
    #[serde(default = "half")]
    pub q: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

/// End points `left[n] = a[n][0]`, `right[n] = a[n][n+1]` for `n = 0..len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTable {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl BoundaryTable {
    pub fn new(left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::DimensionMismatch {
                step: 0,
                expected: left.len(),
                got: right.len(),
            });
        }
        if left.is_empty() {
            return Err(Error::EmptySample);
        }
        for n in 0..left.len() {
            if !left[n].is_finite() {
                return Err(Error::BoundaryOverflow { step: n, index: 0 });
            }
            if !right[n].is_finite() {
                return Err(Error::BoundaryOverflow { step: n, index: n + 1 });
            }
            if n == 0 {
                if !(left[0] < right[0]) {
                    return Err(Error::DegenerateInterval {
                        step: 0,
                        length: right[0] - left[0],
                    });
                }
                continue;
            }
            if left[n] > left[n - 1] {
                return Err(Error::BoundaryNotMonotone {
                    step: n,
                    index: 0,
                    value: left[n],
                    previous: left[n - 1],
                });
            }
            if right[n] < right[n - 1] {
                return Err(Error::BoundaryNotMonotone {
                    step: n,
                    index: n + 1,
                    value: right[n],
                    previous: right[n - 1],
                });
            }
        }
        Ok(BoundaryTable { left, right })
    }

    /// Last step covered.
    pub fn last(&self) -> usize {
        self.left.len() - 1
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    fn get(&self, n: usize) -> Result<(f64, f64)> {
        match (self.left.get(n), self.right.get(n)) {
            (Some(&a), Some(&b)) => Ok((a, b)),
            _ => Err(Error::TableExhausted {
                step: n,
                last: self.last(),
            }),
        }
    }
}

impl BoundarySpec {
    pub fn new(kind: BoundaryKind, r: f64, q: f64) -> Result<Self> {
        let spec = BoundarySpec { kind, r, q };
        spec.validate()?;
        Ok(spec)
    }

    pub fn power(c: f64, r: f64, q: f64) -> Result<Self> {
        Self::new(BoundaryKind::PowerLaw { c }, r, q)
    }

    /// The boundary for which constant proportion `p` keeps break points on a lattice:
    /// `l_n = r (n + 1)` with `q = 1 - p`.
    pub fn regular_case(r: f64, p: f64) -> Result<Self> {
        Self::power(1.0, r, 1.0 - p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::param("q", self.q, "must lie in [0, 1]"));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::param("r", self.r, "must be positive and finite"));
        }
        match &self.kind {
            BoundaryKind::PowerLaw { c } if !(*c > 0.0) || !c.is_finite() => {
                Err(Error::param("c", *c, "must be positive and finite"))
            }
            BoundaryKind::Custom { table, .. } => {
                BoundaryTable::new(table.left.clone(), table.right.clone()).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self.kind, BoundaryKind::PoissonArrivals)
    }

    /// Right share of the growth as metadata.
    pub fn q(&self) -> f64 {
        match self.kind {
            BoundaryKind::PoissonArrivals => 0.5,
            _ => self.q,
        }
    }

    pub fn regime(&self) -> Option<Regime> {
        match &self.kind {
            BoundaryKind::Constant | BoundaryKind::Logarithmic => Some(Regime::Slow),
            BoundaryKind::PowerLaw { c } => Some(Regime::Regular(*c)),
            BoundaryKind::Exponential => Some(Regime::Fast),
            BoundaryKind::PoissonArrivals => Some(Regime::Regular(1.0)),
            BoundaryKind::Custom { regime, .. } => *regime,
        }
    }

    /// Fixes the boundary sequence. Random kinds draw `n_max + 1` steps from
    /// the `BoundaryRight`/`BoundaryLeft` substreams of `stream`.
    pub fn realize(&self, n_max: usize, stream: Option<RngStream>) -> Result<Boundary> {
        self.validate()?;
        let regime = self.regime();
        let q = self.q();
        let source = match &self.kind {
            BoundaryKind::Constant => Source::Closed(Family::Constant),
            BoundaryKind::Logarithmic => Source::Closed(Family::Logarithmic),
            BoundaryKind::PowerLaw { c } => Source::Closed(Family::Power(*c)),
            BoundaryKind::Exponential => Source::Closed(Family::Exponential),
            BoundaryKind::Custom { table, .. } => Source::Table(table.clone()),
            BoundaryKind::PoissonArrivals => {
                let stream = stream.ok_or(Error::MissingSeed)?;
                Source::Table(poisson_table(n_max, stream)?)
            }
        };
        Ok(Boundary {
            source,
            r: self.r,
            q,
            regime,
        })
    }
}

/// `S_n` and `S'_n` as partial sums of `E_0..=E_n` and `E'_0..=E'_n`.
fn poisson_table(n_max: usize, stream: RngStream) -> Result<BoundaryTable> {
    let mut right_rng = stream.rng(Substream::BoundaryRight);
    let mut left_rng = stream.rng(Substream::BoundaryLeft);
    let (mut s, mut s_prime) = (0.0, 0.0);
    let mut left = Vec::with_capacity(n_max + 1);
    let mut right = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        s += exp1(&mut right_rng);
        s_prime += exp1(&mut left_rng);
        left.push(-s_prime);
        right.push(s);
    }
    BoundaryTable::new(left, right)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Constant,
    Logarithmic,
    Power(f64),
    Exponential,
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Closed(Family),
    Table(BoundaryTable),
}

/// A realized boundary sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Boundary {
    source: Source,
    r: f64,
    q: f64,
    regime: Option<Regime>,
}

impl Boundary {
    pub fn from_table(table: BoundaryTable, q: f64, regime: Option<Regime>) -> Self {
        Boundary {
            source: Source::Table(table),
            r: 1.0,
            q,
            regime,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn regime(&self) -> Option<Regime> {
        self.regime
    }

    /// Last step available, `None` for closed-form families.
    pub fn last(&self) -> Option<usize> {
        match &self.source {
            Source::Closed(_) => None,
            Source::Table(t) => Some(t.last()),
        }
    }

    /// `(a[n][0], a[n][n+1])`.
    pub fn endpoints(&self, n: usize) -> Result<(f64, f64)> {
        match &self.source {
            Source::Closed(_) => {
                let l = self.extended_length(n as f64);
                let ends = (-(1.0 - self.q) * l, self.q * l);
                if ends.0.is_finite() && ends.1.is_finite() {
                    Ok(ends)
                } else {
                    Err(Error::BoundaryOverflow { step: n, index: n + 1 })
                }
            }
            Source::Table(t) => t.get(n),
        }
    }

    /// `l_n = a[n][n+1] - a[n][0]`.
    pub fn length(&self, n: usize) -> Result<f64> {
        let (a, b) = self.endpoints(n)?;
        Ok(b - a)
    }

    /// `L(x)`, the extension of `l_n` to real arguments `x >= 0`.
    /// Tables are linearly interpolated and held constant past their end.
    pub fn extended_length(&self, x: f64) -> f64 {
        match &self.source {
            Source::Closed(f) => self.r * family_length(*f, x),
            Source::Table(t) => {
                let l = |n: usize| t.right[n] - t.left[n];
                let x = x.max(0.0);
                let i = x.floor() as usize;
                if i >= t.last() {
                    return l(t.last());
                }
                let w = x - i as f64;
                (1.0 - w) * l(i) + w * l(i + 1)
            }
        }
    }

    /// `L(x) / L(y)`, evaluated without overflow for the exponential family.
    pub fn length_ratio(&self, x: f64, y: f64) -> f64 {
        match self.source {
            Source::Closed(Family::Exponential) => (x - y).exp(),
            _ => self.extended_length(x) / self.extended_length(y),
        }
    }

    /// `l_{n-1} / l_n` for `n >= 1`.
    pub fn shrink(&self, n: usize) -> Result<f64> {
        match &self.source {
            Source::Closed(f) => {
                let s = match f {
                    Family::Constant => 1.0,
                    Family::Exponential => (-1.0f64).exp(),
                    _ => family_length(*f, (n - 1) as f64) / family_length(*f, n as f64),
                };
                Ok(s)
            }
            Source::Table(_) => {
                let l = self.length(n)?;
                Ok(self.length(n - 1)? / l)
            }
        }
    }

    /// `(a[n-1][0] - a[n][0]) / l_n` for `n >= 1`.
    pub fn shift(&self, n: usize) -> Result<f64> {
        match &self.source {
            Source::Closed(_) => Ok((1.0 - self.q) * (1.0 - self.shrink(n)?)),
            Source::Table(t) => {
                let (a_prev, _) = t.get(n - 1)?;
                let (a, b) = t.get(n)?;
                Ok((a_prev - a) / (b - a))
            }
        }
    }

    /// `q_n = (a[n][n+1] - a[n-1][n]) / (l_n - l_{n-1})`, `None` when `l_n = l_{n-1}`.
    pub fn q_step(&self, n: usize) -> Result<Option<f64>> {
        match &self.source {
            Source::Closed(Family::Constant) => Ok(None),
            Source::Closed(_) => Ok(Some(self.q)),
            Source::Table(t) => {
                let (a_prev, b_prev) = t.get(n - 1)?;
                let (a, b) = t.get(n)?;
                let growth = (b - a) - (b_prev - a_prev);
                if growth > 0.0 {
                    Ok(Some((b - b_prev) / growth))
                } else {
                    Ok(None)
                }
            }
        }
    }
}

fn family_length(f: Family, x: f64) -> f64 {
    match f {
        Family::Constant => 1.0,
        Family::Logarithmic => (x + core::f64::consts::E).ln(),
        Family::Power(c) => (x + 1.0).powf(c),
        Family::Exponential => x.exp(),
    }
}
