//! Verdict records shared by every Monte Carlo check.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Significance level used by every test in the crate.
pub const TEST_LEVEL: f64 = 0.01;

/// Above this many KS tests in one report a multiple-testing note is added.
pub const MULTIPLE_TESTING_LIMIT: usize = 20;

/// One pass/fail line: `{test, n, replications, statistic, threshold, pass}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub test: String,
    pub n: u64,
    pub replications: u64,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    /// A check that passes when `statistic < threshold`.
    pub fn below(test: impl Into<String>, n: usize, replications: usize, statistic: f64, threshold: f64) -> Self {
        Check {
            test: test.into(),
            n: n as u64,
            replications: replications as u64,
            statistic,
            threshold,
            pass: statistic < threshold,
        }
    }

    /// A check that passes when `statistic <= threshold`.
    pub fn at_most(test: impl Into<String>, n: usize, replications: usize, statistic: f64, threshold: f64) -> Self {
        Check {
            pass: statistic <= threshold,
            ..Check::below(test, n, replications, statistic, threshold)
        }
    }

    /// A check that passes when `statistic >= threshold`.
    pub fn at_least(test: impl Into<String>, n: usize, replications: usize, statistic: f64, threshold: f64) -> Self {
        Check {
            pass: statistic >= threshold,
            ..Check::below(test, n, replications, statistic, threshold)
        }
    }

    fn is_ks(&self) -> bool {
        self.test.starts_with("ks_")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn ks_count(&self) -> usize {
        self.checks.iter().filter(|c| c.is_ks()).count()
    }

    /// Adds the multiple-testing note when the report carries many KS tests.
    pub fn finish(mut self) -> Self {
        let ks = self.ks_count();
        if ks > MULTIPLE_TESTING_LIMIT {
            self.notes.push(alloc::format!(
                "{ks} KS tests at level {TEST_LEVEL}: about {:.1} false rejections expected under the null",
                ks as f64 * TEST_LEVEL
            ));
        }
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn find(&self, test: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.test == test)
    }
}

impl core::fmt::Display for Check {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "[{}] {} (n={}, R={}): statistic {:.6e}, threshold {:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.test,
            self.n,
            self.replications,
            self.statistic,
            self.threshold
        )
    }
}
