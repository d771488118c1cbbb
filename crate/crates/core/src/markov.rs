//! The Markov-chain representation of normalized break points.
//!
//! With `Y[n][k] ~ Bernoulli(p[n][k])`, `nu_n ~ Bernoulli(q_n)` and
//! `eps_n ~ Bernoulli(1 - l_{n-1}/l_n)`, the chain
//!
//! ```text
//! x_0 = 0,   x_n = n eps_n nu_n + (1 - eps_n) (x_{n-1} + Y[n][x_{n-1}+1])
//! ```
//!
//! satisfies `P(x_n <= k - 1) = alpha[n][k]`, the normalized `k`-th break
//! point. `tau_n` is the last restart time (`eps_tau = 1`), and
//! `s_n = sum_{k<=n} Y[k][x_{k-1}+1]`, so `x_n = tau_n nu_tau + s_n - s_tau`.

use alloc::format;
use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{Boundary, BoundarySpec, Regime};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::report::{Check, Report};
use crate::rng::{RngStream, Substream, bernoulli};
use crate::split::{Proportions, SplitSpec};
use crate::stats::dist::FnCdf;
use crate::stats::ks::{critical_one_sample, ks_distance, sorted_sample};
use crate::stats::moments::MomentCheck;

/// A realized boundary together with a fixed proportion array.
///
/// Random boundaries and splits are handled conditionally: the proportions and the
/// boundary are drawn once and the chain runs on top of them.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub boundary: Boundary,
    pub proportions: Proportions,
}

/// Per-step Bernoulli rates: `eps[n] = 1 - l_{n-1}/l_n` and `q[n] = q_n`.
/// Entry 0 holds `eps = 0` and the restart parameter `q_0 = q` used for `nu_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainCoefficients {
    pub eps: Vec<f64>,
    pub q: Vec<f64>,
}

impl ChainParams {
    pub fn new(boundary: Boundary, proportions: Proportions) -> Self {
        ChainParams { boundary, proportions }
    }

    /// Realizes the boundary and the split (random ones from `stream`) up to step `n_max`.
    pub fn from_specs(
        boundary: &BoundarySpec,
        split: &SplitSpec,
        n_max: usize,
        stream: Option<RngStream>,
    ) -> Result<Self> {
        Ok(ChainParams {
            boundary: boundary.realize(n_max, stream)?,
            proportions: split.realize(n_max, stream)?,
        })
    }

    pub fn coefficients(&self, n: usize) -> Result<ChainCoefficients> {
        let mut eps = Vec::with_capacity(n + 1);
        let mut q = Vec::with_capacity(n + 1);
        eps.push(0.0);
        q.push(self.boundary.q());
        for k in 1..=n {
            let rate = (1.0 - self.boundary.shrink(k)?).max(0.0);
            let qk = self.boundary.q_step(k)?;
            eps.push(if qk.is_some() { rate } else { 0.0 });
            q.push(qk.unwrap_or(self.boundary.q()).clamp(0.0, 1.0));
        }
        Ok(ChainCoefficients { eps, q })
    }
}

/// Row `alpha[n][0..=n+1]` by the exact recursion
/// `alpha[n][k] = shift_n + shrink_n (p alpha[n-1][k-1] + (1 - p) alpha[n-1][k])`.
pub fn alpha_exact(params: &ChainParams, n: usize) -> Result<Vec<f64>> {
    let mut rows = AlphaRows::new(&params.boundary);
    let mut p = Vec::with_capacity(n);
    for m in 1..=n {
        params.proportions.fill_row(m, &mut p)?;
        rows.step_with(&p)?;
    }
    Ok(rows.row)
}

/// Steps the alpha recursion one row at a time; proportions are supplied per row.
#[derive(Debug, Clone)]
pub struct AlphaRows<'a> {
    boundary: &'a Boundary,
    n: usize,
    row: Vec<f64>,
}

impl<'a> AlphaRows<'a> {
    pub fn new(boundary: &'a Boundary) -> Self {
        AlphaRows {
            boundary,
            n: 0,
            row: alloc::vec![0.0, 1.0],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }

    /// Normalized interior break points `alpha[n][1..=n]`.
    pub fn atoms(&self) -> &[f64] {
        &self.row[1..=self.n]
    }

    /// Advances to step `n + 1` with `p[n+1][1..=n+1] = proportions`.
    pub fn step_with(&mut self, proportions: &[f64]) -> Result<&[f64]> {
        let n = self.n + 1;
        if proportions.len() != n {
            return Err(Error::DimensionMismatch {
                step: n,
                expected: n,
                got: proportions.len(),
            });
        }
        if let Some(k) = proportions.iter().position(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::ProportionOutOfRange {
                step: n,
                index: k + 1,
                value: proportions[k],
            });
        }
        let l = match self.boundary.length(n) {
            // Exponential lengths overflow long before their ratios do.
            Err(Error::BoundaryOverflow { .. }) => f64::INFINITY,
            other => other?,
        };
        if !(l > 0.0) {
            return Err(Error::DegenerateInterval { step: n, length: l });
        }
        let shrink = self.boundary.shrink(n)?;
        let shift = self.boundary.shift(n)?;
        let row = &mut self.row;
        row.push(1.0);
        for k in (1..=n).rev() {
            let p = proportions[k - 1];
            row[k] = shift + shrink * (p * row[k - 1] + (1.0 - p) * row[k]);
        }
        self.n = n;
        Ok(&self.row)
    }
}

/// A full simulated trajectory, indices `0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainPath {
    pub x: Vec<usize>,
    pub tau: Vec<usize>,
    pub s: Vec<usize>,
    pub nu: Vec<bool>,
}

impl ChainPath {
    /// `x_m = tau_m nu_{tau_m} + s_m - s_{tau_m}` at every step.
    pub fn identity_holds(&self) -> bool {
        (0..self.x.len()).all(|m| {
            let t = self.tau[m];
            self.x[m] == t * usize::from(self.nu[t]) + self.s[m] - self.s[t]
        })
    }
}

/// State at the last step of a simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEnd {
    pub x: usize,
    pub tau: usize,
    pub nu_tau: bool,
}

/// Simulates `(x, tau, s, nu)` to step `n`, checking the pathwise identity at every step.
pub fn simulate_path<R: Rng + ?Sized>(
    params: &ChainParams,
    coefs: &ChainCoefficients,
    n: usize,
    rng: &mut R,
) -> Result<ChainPath> {
    check_coefficients(coefs, n)?;
    let mut path = ChainPath {
        x: Vec::with_capacity(n + 1),
        tau: Vec::with_capacity(n + 1),
        s: Vec::with_capacity(n + 1),
        nu: Vec::with_capacity(n + 1),
    };
    let nu0 = bernoulli(rng, coefs.q[0]);
    path.x.push(0);
    path.tau.push(0);
    path.s.push(0);
    path.nu.push(nu0);
    for m in 1..=n {
        let eps = bernoulli(rng, coefs.eps[m]);
        let nu = eps && bernoulli(rng, coefs.q[m]);
        let x_prev = path.x[m - 1];
        let y = bernoulli(rng, params.proportions.get(m, x_prev + 1)?);
        let s = path.s[m - 1] + usize::from(y);
        let (x, tau) = if eps {
            (m * usize::from(nu), m)
        } else {
            (x_prev + usize::from(y), path.tau[m - 1])
        };
        path.x.push(x);
        path.tau.push(tau);
        path.s.push(s);
        path.nu.push(nu);
        if x != tau * usize::from(path.nu[tau]) + s - path.s[tau] {
            return Err(Error::Precondition(format!(
                "representation identity broken at step {m}"
            )));
        }
    }
    Ok(path)
}

/// Like [`simulate_path`] but keeps only the final state.
pub fn simulate_end<R: Rng + ?Sized>(
    params: &ChainParams,
    coefs: &ChainCoefficients,
    n: usize,
    rng: &mut R,
) -> Result<ChainEnd> {
    check_coefficients(coefs, n)?;
    let mut end = ChainEnd {
        x: 0,
        tau: 0,
        nu_tau: bernoulli(rng, coefs.q[0]),
    };
    let constant = match params.proportions {
        Proportions::Constant(p) => Some(p),
        _ => None,
    };
    for m in 1..=n {
        let eps = bernoulli(rng, coefs.eps[m]);
        let nu = eps && bernoulli(rng, coefs.q[m]);
        let p = match constant {
            Some(p) => p,
            None => params.proportions.get(m, end.x + 1)?,
        };
        let y = bernoulli(rng, p);
        if eps {
            end = ChainEnd {
                x: m * usize::from(nu),
                tau: m,
                nu_tau: nu,
            };
        } else {
            end.x += usize::from(y);
        }
    }
    Ok(end)
}

fn check_coefficients(coefs: &ChainCoefficients, n: usize) -> Result<()> {
    if coefs.eps.len() <= n || coefs.q.len() <= n {
        return Err(Error::DimensionMismatch {
            step: n,
            expected: n + 1,
            got: coefs.eps.len().min(coefs.q.len()),
        });
    }
    Ok(())
}

fn simulate_ends<E: Executor>(
    params: &ChainParams,
    n: usize,
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<ChainEnd>> {
    let coefs = params.coefficients(n)?;
    exec.map(replications, |r| {
        let mut rng = RngStream::new(seed, r as u64).rng(Substream::Chain);
        simulate_end(params, &coefs, n, &mut rng)
    })
    .into_iter()
    .collect()
}

/// Monte Carlo estimate of `P(x_n <= k - 1)` against [`alpha_exact`], one z-score per `k`.
pub fn representation_check<E: Executor>(
    params: &ChainParams,
    n: usize,
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<Report> {
    let alpha = alpha_exact(params, n)?;
    let ends = simulate_ends(params, n, replications, seed, exec)?;
    let mut counts = alloc::vec![0usize; n + 1];
    for e in &ends {
        counts[e.x] += 1;
    }
    let r = replications as f64;
    let mut cumulative = 0usize;
    let (mut max_z, mut max_dev) = (0.0f64, 0.0f64);
    let mut all_pass = true;
    for k in 1..=n + 1 {
        cumulative += counts[k - 1];
        let estimate = cumulative as f64 / r;
        let target = alpha[k];
        let se = (target * (1.0 - target) / r).sqrt();
        let c = MomentCheck::new("p", estimate, target, se);
        all_pass &= c.pass;
        max_z = max_z.max(c.z.abs());
        max_dev = max_dev.max((estimate - target).abs());
    }
    let mut report = Report::new();
    report.push(Check {
        pass: all_pass,
        ..Check::below("representation_max_z", n, replications, max_z, 4.0)
    });
    report.push(Check::at_most(
        "representation_max_abs_deviation",
        n,
        replications,
        max_dev,
        4.0 * (0.25 / r).sqrt(),
    ));
    Ok(report.finish())
}

/// Exact `sup_t |P(tau_n / n <= t) - t^c|`, from `P(tau_n <= k) = l_k / l_n`.
fn tau_discretization(boundary: &Boundary, n: usize, c: f64) -> f64 {
    let nf = n as f64;
    let f = |t: f64| t.clamp(0.0, 1.0).powf(c);
    (0..=n)
        .map(|k| {
            let g = boundary.length_ratio(k as f64, nf);
            let lo = f(k as f64 / nf);
            let hi = if k == n { 1.0 } else { f((k + 1) as f64 / nf) };
            (g - lo).abs().max((g - hi).abs())
        })
        .fold(0.0, f64::max)
}

/// Largest atom of `L(tau_n) / L(n)`.
fn tau_max_jump(boundary: &Boundary, n: usize) -> f64 {
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            let below = if k == 0 {
                0.0
            } else {
                boundary.length_ratio((k - 1) as f64, nf)
            };
            boundary.length_ratio(k as f64, nf) - below
        })
        .fold(0.0, f64::max)
}

/// Samples of `(tau_n, nu_{tau_n})` from the forward chain.
pub fn tau_samples<E: Executor>(
    params: &ChainParams,
    n: usize,
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<(usize, bool)>> {
    Ok(simulate_ends(params, n, replications, seed, exec)?
        .into_iter()
        .map(|e| (e.tau, e.nu_tau))
        .collect())
}

/// Empirical checks of the restart time `tau_n`.
///
/// * `P(tau_n <= k) = l_k / l_n` at `k = n/4, n/2, 3n/4` (z-scores);
/// * regular regimes: KS of `L(tau_n)/L(n)` against the uniform law and of
///   `tau_n/n` against `t^c`, each threshold widened by the exact
///   finite-`n` discretization gap;
/// * slow regimes: mass of `{tau_n/n <= 0.1}` at least 0.95; fast regimes:
///   mass of `{tau_n/n > 0.9}` at least 0.95;
/// * asymptotic independence of `tau_n/n` and `nu_{tau_n}`: the sup over
///   `t in {0.05, ..., 1}` and `x in {0, 1}` of the factorization gap is below
///   `2/sqrt(R)`, four standard deviations of the worst cell.
pub fn tau_statistics<E: Executor>(
    params: &ChainParams,
    n: usize,
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<Report> {
    let regime = params.boundary.regime().ok_or(Error::UnknownRegime)?;
    if n == 0 {
        return Err(Error::param("n", 0.0, "must be positive"));
    }
    let samples = tau_samples(params, n, replications, seed, exec)?;
    let r = replications as f64;
    let nf = n as f64;
    let b = &params.boundary;
    let mut report = Report::new();

    for k in [n / 4, n / 2, 3 * n / 4] {
        let target = b.length_ratio(k as f64, nf);
        let estimate = samples.iter().filter(|s| s.0 <= k).count() as f64 / r;
        let c = MomentCheck::new(
            format!("tau_closed_form_k{k}"),
            estimate,
            target,
            (target * (1.0 - target) / r).sqrt(),
        );
        report.push(c.to_check(n, replications));
    }

    let ratios: Vec<f64> = samples.iter().map(|s| s.0 as f64 / nf).collect();
    match regime {
        Regime::Regular(c) => {
            let l_ratio: Vec<f64> = samples.iter().map(|s| b.length_ratio(s.0 as f64, nf)).collect();
            let d = ks_distance(&sorted_sample(&l_ratio)?, &FnCdf(|t: f64| t.clamp(0.0, 1.0)));
            let slack = tau_max_jump(b, n);
            report.push(Check::below(
                "ks_tau_length_ratio_uniform",
                n,
                replications,
                d,
                critical_one_sample(replications) + slack,
            ));
            let d = ks_distance(
                &sorted_sample(&ratios)?,
                &FnCdf(move |t: f64| t.clamp(0.0, 1.0).powf(c)),
            );
            let slack = tau_discretization(b, n, c);
            report.push(Check::below(
                "ks_tau_over_n_power",
                n,
                replications,
                d,
                critical_one_sample(replications) + slack,
            ));
        }
        Regime::Slow => {
            let mass = ratios.iter().filter(|&&t| t <= 0.1).count() as f64 / r;
            report.push(Check::at_least("tau_mass_near_zero", n, replications, mass, 0.95));
        }
        Regime::Fast => {
            let mass = ratios.iter().filter(|&&t| t > 0.9).count() as f64 / r;
            report.push(Check::at_least("tau_mass_near_one", n, replications, mass, 0.95));
        }
    }

    let q = b.q();
    let mut gap = 0.0f64;
    for i in 1..=20 {
        let t = i as f64 / 20.0;
        let below: Vec<&(usize, bool)> = samples.iter().filter(|s| s.0 as f64 / nf <= t).collect();
        let p_t = below.len() as f64 / r;
        let p_t1 = below.iter().filter(|s| s.1).count() as f64 / r;
        let p_t0 = p_t - p_t1;
        gap = gap.max((p_t1 - p_t * q).abs()).max((p_t0 - p_t * (1.0 - q)).abs());
    }
    report.push(Check::below(
        "tau_nu_independence",
        n,
        replications,
        gap,
        2.0 / r.sqrt(),
    ));
    Ok(report.finish())
}
