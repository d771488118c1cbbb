//! Distributions with closed-form CDFs.
//!
//! Everything the verification suites compare against is an elementary
//! function: uniform and power-beta laws, shape 2 and 3 gammas, the unit
//! exponential, the stationary origin-gap law `½Γ₂ + ½Exp(1)`, point masses
//! and finite mixtures of these.

use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{bernoulli, exp1, gamma2, uniform};

/// A cumulative distribution function, right-continuous, with its left limits.
pub trait Cdf {
    fn cdf(&self, x: f64) -> f64;

    /// `F(x-)`; equal to `cdf` for continuous laws.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

/// Wraps a continuous CDF given as a closure.
#[derive(Clone, Copy)]
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> Cdf for FnCdf<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

impl<C: Cdf + ?Sized> Cdf for &C {
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        (**self).cdf_left(x)
    }
}

/// Beta laws whose CDF is a single power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BetaPow {
    /// β(1, b): CDF `1 - (1 - x)^b` on `[0, 1]`.
    Left(f64),
    /// β(a, 1): CDF `x^a` on `[0, 1]`.
    Right(f64),
}

impl BetaPow {
    fn unit_cdf(self, u: f64) -> f64 {
        match self {
            BetaPow::Left(b) => 1.0 - (1.0 - u).powf(b),
            BetaPow::Right(a) => u.powf(a),
        }
    }

    fn unit_quantile(self, v: f64) -> f64 {
        match self {
            BetaPow::Left(b) => 1.0 - (1.0 - v).powf(1.0 / b),
            BetaPow::Right(a) => v.powf(1.0 / a),
        }
    }

    fn unit_mean(self) -> f64 {
        match self {
            BetaPow::Left(b) => 1.0 / (1.0 + b),
            BetaPow::Right(a) => a / (1.0 + a),
        }
    }

    fn unit_variance(self) -> f64 {
        let s = match self {
            BetaPow::Left(s) | BetaPow::Right(s) => s,
        };
        s / ((1.0 + s) * (1.0 + s) * (2.0 + s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClosedFormDist {
    Uniform01,
    /// A power-beta law rescaled to `[lo, hi]`; `lo == hi` is the point mass at `lo`.
    BetaPow {
        shape: BetaPow,
        lo: f64,
        hi: f64,
    },
    Gamma2,
    Gamma3,
    Exp1,
    /// Mixture `½Γ₂ + ½Exp(1)`, survival `e^{-t}(1 + t/2)`.
    MixGamma2Exp,
    Dirac(f64),
    /// Weighted components; weights are normalized on construction.
    Mixture(Vec<(f64, ClosedFormDist)>),
}

impl ClosedFormDist {
    /// Builds a mixture, dropping zero-weight components.
    pub fn mixture(components: Vec<(f64, ClosedFormDist)>) -> Result<Self> {
        let mut kept: Vec<(f64, ClosedFormDist)> = Vec::with_capacity(components.len());
        let mut total = 0.0;
        for (w, d) in components {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::param("weight", w, "must be finite and non-negative"));
            }
            if w > 0.0 {
                total += w;
                kept.push((w, d));
            }
        }
        if kept.is_empty() {
            return Err(Error::param("weight", total, "mixture has no positive weight"));
        }
        for c in &mut kept {
            c.0 /= total;
        }
        if kept.len() == 1 {
            return Ok(kept.pop().map(|(_, d)| d).unwrap_or(ClosedFormDist::Uniform01));
        }
        Ok(ClosedFormDist::Mixture(kept))
    }

    pub fn survival(&self, x: f64) -> f64 {
        match self {
            ClosedFormDist::Gamma2 if x > 0.0 => (-x).exp() * (1.0 + x),
            ClosedFormDist::Gamma3 if x > 0.0 => (-x).exp() * (1.0 + x + 0.5 * x * x),
            ClosedFormDist::Exp1 if x > 0.0 => (-x).exp(),
            ClosedFormDist::MixGamma2Exp if x > 0.0 => (-x).exp() * (1.0 + 0.5 * x),
            _ => 1.0 - self.cdf(x),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ClosedFormDist::Uniform01 => 0.5,
            ClosedFormDist::BetaPow { shape, lo, hi } => lo + (hi - lo) * shape.unit_mean(),
            ClosedFormDist::Gamma2 => 2.0,
            ClosedFormDist::Gamma3 => 3.0,
            ClosedFormDist::Exp1 => 1.0,
            ClosedFormDist::MixGamma2Exp => 1.5,
            ClosedFormDist::Dirac(a) => *a,
            ClosedFormDist::Mixture(cs) => cs.iter().map(|(w, d)| w * d.mean()).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            ClosedFormDist::Uniform01 => 1.0 / 12.0,
            ClosedFormDist::BetaPow { shape, lo, hi } => (hi - lo) * (hi - lo) * shape.unit_variance(),
            ClosedFormDist::Gamma2 => 2.0,
            ClosedFormDist::Gamma3 => 3.0,
            ClosedFormDist::Exp1 => 1.0,
            ClosedFormDist::MixGamma2Exp => 1.75,
            ClosedFormDist::Dirac(_) => 0.0,
            ClosedFormDist::Mixture(cs) => {
                let m = self.mean();
                let second: f64 = cs
                    .iter()
                    .map(|(w, d)| {
                        let dm = d.mean();
                        w * (d.variance() + dm * dm)
                    })
                    .sum();
                second - m * m
            }
        }
    }

    /// Left-continuous quantile `inf { x : F(x) >= u }` for `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            ClosedFormDist::Uniform01 => u,
            ClosedFormDist::BetaPow { shape, lo, hi } => {
                if hi <= lo {
                    *lo
                } else {
                    lo + (hi - lo) * shape.unit_quantile(u)
                }
            }
            ClosedFormDist::Exp1 => -(-u).ln_1p(),
            ClosedFormDist::Dirac(a) => *a,
            _ => {
                let (mut lo, mut hi) = self.bracket();
                while self.cdf(hi) < u {
                    hi = 2.0 * hi + 1.0;
                }
                while self.cdf_left(lo) >= u && lo > -1e300 {
                    lo = 2.0 * lo - 1.0;
                }
                bisect_quantile(|x| self.cdf(x), u, lo, hi)
            }
        }
    }

    fn bracket(&self) -> (f64, f64) {
        match self {
            ClosedFormDist::Gamma2 | ClosedFormDist::Gamma3 | ClosedFormDist::MixGamma2Exp => (0.0, 16.0),
            ClosedFormDist::Mixture(cs) => cs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, d)| {
                let (lo, hi) = d.bracket();
                (a.min(lo), b.max(hi))
            }),
            ClosedFormDist::Uniform01 => (0.0, 1.0),
            ClosedFormDist::BetaPow { lo, hi, .. } => (*lo, *hi),
            ClosedFormDist::Exp1 => (0.0, 16.0),
            ClosedFormDist::Dirac(a) => (*a, *a),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ClosedFormDist::Uniform01 => uniform(rng),
            ClosedFormDist::BetaPow { .. } => self.quantile(uniform(rng)),
            ClosedFormDist::Gamma2 => gamma2(rng),
            ClosedFormDist::Gamma3 => gamma2(rng) + exp1(rng),
            ClosedFormDist::Exp1 => exp1(rng),
            ClosedFormDist::MixGamma2Exp => {
                if bernoulli(rng, 0.5) {
                    gamma2(rng)
                } else {
                    exp1(rng)
                }
            }
            ClosedFormDist::Dirac(a) => *a,
            ClosedFormDist::Mixture(cs) => {
                let u = uniform(rng);
                let mut acc = 0.0;
                for (w, d) in cs {
                    acc += w;
                    if u < acc {
                        return d.sample(rng);
                    }
                }
                cs.last().map(|(_, d)| d.sample(rng)).unwrap_or(f64::NAN)
            }
        }
    }
}

impl Cdf for ClosedFormDist {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            ClosedFormDist::Uniform01 => x.clamp(0.0, 1.0),
            ClosedFormDist::BetaPow { shape, lo, hi } => {
                if hi <= lo {
                    return if x >= *lo { 1.0 } else { 0.0 };
                }
                let u = (x - lo) / (hi - lo);
                if u <= 0.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    shape.unit_cdf(u)
                }
            }
            ClosedFormDist::Gamma2 | ClosedFormDist::Gamma3 | ClosedFormDist::Exp1 | ClosedFormDist::MixGamma2Exp => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - self.survival(x)
                }
            }
            ClosedFormDist::Dirac(a) => {
                if x >= *a {
                    1.0
                } else {
                    0.0
                }
            }
            ClosedFormDist::Mixture(cs) => cs.iter().map(|(w, d)| w * d.cdf(x)).sum(),
        }
    }

    fn cdf_left(&self, x: f64) -> f64 {
        match self {
            ClosedFormDist::BetaPow { lo, hi, .. } if hi <= lo => {
                if x > *lo {
                    1.0
                } else {
                    0.0
                }
            }
            ClosedFormDist::Dirac(a) => {
                if x > *a {
                    1.0
                } else {
                    0.0
                }
            }
            ClosedFormDist::Mixture(cs) => cs.iter().map(|(w, d)| w * d.cdf_left(x)).sum(),
            _ => self.cdf(x),
        }
    }
}

/// Smallest `x` in `[lo, hi]` with `cdf(x) >= u`, to floating-point resolution.
pub(crate) fn bisect_quantile(cdf: impl Fn(f64) -> f64, u: f64, mut lo: f64, mut hi: f64) -> f64 {
    if cdf(lo) >= u {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cdf(mid) >= u {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
