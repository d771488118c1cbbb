//! z-score checks of sample means, variances and covariances.
//!
//! Every moment comparison reports `z = (estimate - target) / se` and passes
//! when `|z| < 4`. Standard errors are plug-in: `sqrt(s²/N)` for the mean,
//! `sqrt((m4 - m2²)/N)` for the variance and the analogous product-moment
//! form for covariances. When the standard error is exactly zero the
//! estimate must match the target to rounding.

use alloc::string::String;
use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Check;

pub const Z_LIMIT: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub name: String,
    pub estimate: f64,
    pub target: f64,
    pub standard_error: f64,
    pub z: f64,
    pub pass: bool,
}

impl MomentCheck {
    pub fn new(name: impl Into<String>, estimate: f64, target: f64, standard_error: f64) -> Self {
        let gap = estimate - target;
        let (z, pass) = if standard_error > 0.0 {
            let z = gap / standard_error;
            (z, z.abs() < Z_LIMIT)
        } else if gap.abs() <= 1e-12 * target.abs().max(1.0) {
            (0.0, true)
        } else {
            // Serializable stand-in for an infinite z-score.
            (f64::MAX.copysign(gap), false)
        };
        MomentCheck {
            name: name.into(),
            estimate,
            target,
            standard_error,
            z,
            pass,
        }
    }

    /// As a report line with statistic `|z|` and threshold 4.
    pub fn to_check(&self, n: usize, replications: usize) -> Check {
        Check {
            pass: self.pass,
            ..Check::below(self.name.clone(), n, replications, self.z.abs(), Z_LIMIT)
        }
    }
}

fn validate(xs: &[f64]) -> Result<()> {
    if xs.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample);
    }
    Ok(())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn check_mean(name: impl Into<String>, xs: &[f64], target: f64) -> Result<MomentCheck> {
    validate(xs)?;
    let se = (variance(xs) / xs.len() as f64).sqrt();
    Ok(MomentCheck::new(name, mean(xs), target, se))
}

pub fn check_variance(name: impl Into<String>, xs: &[f64], target: f64) -> Result<MomentCheck> {
    validate(xs)?;
    let n = xs.len() as f64;
    let m = mean(xs);
    let (mut m2, mut m4) = (0.0, 0.0);
    for x in xs {
        let d2 = (x - m) * (x - m);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    let se = ((m4 - m2 * m2).max(0.0) / n).sqrt();
    Ok(MomentCheck::new(name, variance(xs), target, se))
}

pub fn check_covariance(name: impl Into<String>, xs: &[f64], ys: &[f64], target: f64) -> Result<MomentCheck> {
    validate(xs)?;
    validate(ys)?;
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            step: 0,
            expected: xs.len(),
            got: ys.len(),
        });
    }
    let n = xs.len() as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    let estimate = products.iter().sum::<f64>() / (n - 1.0);
    let se = (variance(&products) / n).sqrt();
    Ok(MomentCheck::new(name, estimate, target, se))
}

/// Targets for [`moment_report`]; unset entries are skipped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentTargets {
    pub mean: Option<f64>,
    pub variance: Option<f64>,
}

pub fn moment_report(prefix: &str, xs: &[f64], targets: MomentTargets) -> Result<Vec<MomentCheck>> {
    let mut out = Vec::new();
    if let Some(t) = targets.mean {
        out.push(check_mean(alloc::format!("{prefix}_mean"), xs, t)?);
    }
    if let Some(t) = targets.variance {
        out.push(check_variance(alloc::format!("{prefix}_variance"), xs, t)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RngStream, Substream, exp1};
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_rule_for_zero_spread() {
        let xs = vec![0.25; 10];
        let c = check_mean("m", &xs, 0.25).unwrap();
        assert!(c.pass && c.z == 0.0);
        let c = check_mean("m", &xs, 0.3).unwrap();
        assert!(!c.pass);
        assert!(c.z.is_finite());
    }

    #[test]
    fn exponential_moments_pass() {
        let mut rng = RngStream::new(11, 0).rng(Substream::Probe);
        let xs: Vec<f64> = (0..200_000).map(|_| exp1(&mut rng)).collect();
        let checks = moment_report(
            "exp",
            &xs,
            MomentTargets {
                mean: Some(1.0),
                variance: Some(1.0),
            },
        )
        .unwrap();
        assert_eq!(checks.len(), 2);
        assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        // Variance of the sample variance of Exp(1) is (μ4 - σ⁴)/N = 8/N.
        assert_abs_diff_eq!(checks[1].standard_error, (8.0f64 / 200_000.0).sqrt(), epsilon = 2e-4);
    }

    #[test]
    fn wrong_target_fails() {
        let mut rng = RngStream::new(12, 0).rng(Substream::Probe);
        let xs: Vec<f64> = (0..100_000).map(|_| exp1(&mut rng)).collect();
        assert!(!check_mean("m", &xs, 1.05).unwrap().pass);
    }

    #[test]
    fn covariance_of_independent_and_identical() {
        let mut rng = RngStream::new(13, 0).rng(Substream::Probe);
        let xs: Vec<f64> = (0..50_000).map(|_| exp1(&mut rng)).collect();
        let ys: Vec<f64> = (0..50_000).map(|_| exp1(&mut rng)).collect();
        assert!(check_covariance("c", &xs, &ys, 0.0).unwrap().pass);
        assert!(check_covariance("c", &xs, &xs, 1.0).unwrap().pass);
        assert_abs_diff_eq!(
            check_covariance("c", &xs, &xs, 1.0).unwrap().estimate,
            variance(&xs),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rejects_tiny_and_non_finite() {
        assert!(check_mean("m", &[1.0], 1.0).is_err());
        assert!(check_mean("m", &[1.0, f64::INFINITY], 1.0).is_err());
    }
}
