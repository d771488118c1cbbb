//! The rescaled one-point masses `H_n(k) = (n + 1) P(x_n = k)`.
//!
//! For constant proportion `p` and the symmetric linear boundary
//! `a[n][0] = -(n+1)/2`, `a[n][n+1] = (n+1)/2`, the masses obey
//!
//! ```text
//! H_0(0) = 1
//! H_n(0) = 1/2 + (1-p) H_{n-1}(0)
//! H_n(k) = p H_{n-1}(k-1) + (1-p) H_{n-1}(k),   1 <= k <= n-1
//! H_n(n) = 1/2 + p H_{n-1}(n-1)
//! ```
//!
//! and `H_n(k) = (n+1)(alpha[n][k+1] - alpha[n][k])`. Near the left edge the
//! masses tend to `1/(2p)`, near the right edge to `1/(2(1-p))`.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::boundary::BoundarySpec;
use crate::error::{Error, Result};
use crate::markov::{ChainParams, alpha_exact};
use crate::report::{Check, Report};
use crate::split::Proportions;

/// Largest `n` accepted by [`h_cross_check`]; the alpha table costs `O(n²)`.
pub const CROSS_CHECK_MAX_N: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HTable {
    pub n: usize,
    pub p: f64,
    pub values: Vec<f64>,
}

impl HTable {
    /// `H_0 = (1)`.
    pub fn start(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", p, "must lie in (0, 1)"));
        }
        Ok(HTable {
            n: 0,
            p,
            values: alloc::vec![1.0],
        })
    }

    /// Advances from `H_{n}` to `H_{n+1}` in place.
    pub fn step(&mut self) {
        let p = self.p;
        let v = &mut self.values;
        let last = v[v.len() - 1];
        // Left to right, carrying the old value of the left neighbour.
        let mut left = v[0];
        v[0] = 0.5 + (1.0 - p) * left;
        for x in v.iter_mut().skip(1) {
            let old = *x;
            *x = p * left + (1.0 - p) * old;
            left = old;
        }
        v.push(0.5 + p * last);
        self.n += 1;
    }

    /// Kahan-compensated `sum_k H_n(k)`; equals `n + 1`.
    pub fn mass(&self) -> f64 {
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for &x in &self.values {
            let y = x - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        sum
    }
}

pub fn h_table(p: f64, n: usize) -> Result<HTable> {
    let mut t = HTable::start(p)?;
    for _ in 0..n {
        t.step();
    }
    Ok(t)
}

/// Closed form of the left edge, `1/(2p) + (1-p)^n (1 - 1/(2p))`.
pub fn left_edge_closed_form(p: f64, n: usize) -> f64 {
    1.0 / (2.0 * p) + (1.0 - p).powi(n as i32) * (1.0 - 1.0 / (2.0 * p))
}

/// Checks `|H_n(k) - 1/(2p)| <= tol` and `|H_n(n-k) - 1/(2(1-p))| <= tol`
/// for `k = 0..=k_max`, together with mass conservation.
pub fn h_limit_check(p: f64, k_max: usize, n: usize, tol: f64) -> Result<(HTable, Report)> {
    if n < 10 * k_max {
        return Err(Error::param("n", n as f64, "must be at least 10 k_max"));
    }
    let t = h_table(p, n)?;
    let (left, right) = (1.0 / (2.0 * p), 1.0 / (2.0 * (1.0 - p)));
    let left_gap = (0..=k_max).map(|k| (t.values[k] - left).abs()).fold(0.0, f64::max);
    let right_gap = (0..=k_max).map(|k| (t.values[n - k] - right).abs()).fold(0.0, f64::max);
    let mut report = Report::new();
    report.push(Check::at_most("h_left_edge", n, 0, left_gap, tol));
    report.push(Check::at_most("h_right_edge", n, 0, right_gap, tol));
    report.push(Check::at_most("h_mass", n, 0, (t.mass() - (n + 1) as f64).abs(), 1e-9));
    Ok((t, report.finish()))
}

/// `max_k |(n+1)(alpha[n][k+1] - alpha[n][k]) - H_n(k)|`, with alpha from the
/// chain recursion on the boundary `l_n = n + 1`, `q = 1/2`.
pub fn h_cross_check(p: f64, n: usize) -> Result<f64> {
    if n > CROSS_CHECK_MAX_N {
        return Err(Error::param("n", n as f64, "cross check is limited to n <= 2000"));
    }
    let t = h_table(p, n)?;
    let boundary = BoundarySpec::power(1.0, 1.0, 0.5)?.realize(0, None)?;
    let alpha = alpha_exact(&ChainParams::new(boundary, Proportions::Constant(p)), n)?;
    let scale = (n + 1) as f64;
    Ok((0..=n)
        .map(|k| (scale * (alpha[k + 1] - alpha[k]) - t.values[k]).abs())
        .fold(0.0, f64::max))
}
