//! One- and two-sample Kolmogorov-Smirnov statistics.
//!
//! Critical values are the large-sample 1% points, `1.63 / sqrt(R)` for one
//! sample and `1.63 * sqrt((R1 + R2) / (R1 R2))` for two. Ties and atoms in
//! the reference law are handled exactly: the supremum is taken over both
//! `F(x)` and `F(x-)` at every distinct sample value.

use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::dist::Cdf;
use crate::error::{Error, Result};

/// Asymptotic 1% critical coefficient of the Kolmogorov distribution.
pub const KS_COEFFICIENT: f64 = 1.63;

/// Samples below this size are rejected: the asymptotic threshold is too crude.
pub const MIN_KS_SAMPLES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn critical_one_sample(r: usize) -> f64 {
    KS_COEFFICIENT / (r as f64).sqrt()
}

pub fn critical_two_sample(r1: usize, r2: usize) -> f64 {
    let (a, b) = (r1 as f64, r2 as f64);
    KS_COEFFICIENT * ((a + b) / (a * b)).sqrt()
}

/// Copies and sorts a sample, rejecting empty input and non-finite values.
pub fn sorted_sample(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `sup |F_emp - F|` for an already sorted, equally weighted sample.
pub fn ks_distance<C: Cdf + ?Sized>(sorted: &[f64], dist: &C) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        let below = i as f64 / n;
        let upto = j as f64 / n;
        d = d.max((upto - dist.cdf(v)).abs()).max((below - dist.cdf_left(v)).abs());
        i = j;
    }
    d
}

pub fn ks_one_sample<C: Cdf + ?Sized>(samples: &[f64], dist: &C) -> Result<KsOutcome> {
    if samples.len() < MIN_KS_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_KS_SAMPLES,
            got: samples.len(),
        });
    }
    let sorted = sorted_sample(samples)?;
    let statistic = ks_distance(&sorted, dist);
    let threshold = critical_one_sample(samples.len());
    Ok(KsOutcome {
        statistic,
        threshold,
        pass: statistic < threshold,
    })
}

/// `sup |F_a - F_b|` over the pooled sample points.
pub fn two_sample_distance(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] == v {
            i += 1;
        }
        while j < b.len() && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsOutcome> {
    let needed = MIN_KS_SAMPLES;
    if a.len().min(b.len()) < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: a.len().min(b.len()),
        });
    }
    let (a, b) = (sorted_sample(a)?, sorted_sample(b)?);
    let statistic = two_sample_distance(&a, &b);
    let threshold = critical_two_sample(a.len(), b.len());
    Ok(KsOutcome {
        statistic,
        threshold,
        pass: statistic < threshold,
    })
}
