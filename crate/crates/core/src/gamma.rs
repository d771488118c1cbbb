//! Fully random uniform fragmentation between Poisson arrival boundaries.
//!
//! `A[n][0] = -S'_n` and `A[n][n+1] = S_n`, where `S_n` and `S'_n` are partial
//! sums of independent unit exponentials `E_0, E_1, ...` and
//! `E'_0, E'_1, ...`, and all proportions are i.i.d. uniform. Every spacing
//! `I[n][k] = A[n][k+1] - A[n][k]` is then Γ₂ and the spacings at a given step
//! are independent, so the normalized break points are the even order
//! statistics `U_(2) < ... < U_(2n)` of `2n + 1` uniforms.

use alloc::format;
use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::partition::{BreakPoints, evolve_in_place, normalize};
use crate::report::{Check, Report};
use crate::rng::{RngStream, SampleRng, Substream, exp1, uniform};
use crate::stats::dist::ClosedFormDist;
use crate::stats::ks::{ks_distance, ks_one_sample, ks_two_sample, sorted_sample};
use crate::stats::moments::{MomentCheck, check_covariance, check_mean, check_variance, mean};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSetupState {
    pub n: usize,
    pub points: BreakPoints,
}

impl GammaSetupState {
    /// `I[n][k]` for `k = 0..=n`.
    pub fn spacings(&self) -> Vec<f64> {
        self.points.points.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// What one step consumed: proportions `P[n][1..=n]` and the arrivals `E_n`, `E'_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaStep {
    pub n: usize,
    pub proportions: Vec<f64>,
    pub e_right: f64,
    pub e_left: f64,
}

/// Steps the setup forward. Draws match `BoundarySpec` with `PoissonArrivals`
/// and `SplitSpec::FullyRandom(Uniform)` on the same stream.
#[derive(Debug, Clone)]
pub struct GammaRun {
    state: GammaSetupState,
    right: SampleRng,
    left: SampleRng,
    proportions: SampleRng,
    row: Vec<f64>,
    last_e: (f64, f64),
}

impl GammaRun {
    pub fn new(stream: RngStream) -> Self {
        let mut right = stream.rng(Substream::BoundaryRight);
        let mut left = stream.rng(Substream::BoundaryLeft);
        let (e, e_prime) = (exp1(&mut right), exp1(&mut left));
        GammaRun {
            state: GammaSetupState {
                n: 0,
                points: BreakPoints {
                    n: 0,
                    points: alloc::vec![-e_prime, e],
                },
            },
            right,
            left,
            proportions: stream.rng(Substream::Proportions),
            row: Vec::new(),
            last_e: (e, e_prime),
        }
    }

    pub fn state(&self) -> &GammaSetupState {
        &self.state
    }

    /// `(E_n, E'_n)` used by the latest step.
    pub fn last_arrivals(&self) -> (f64, f64) {
        self.last_e
    }

    /// The proportions used by the latest step.
    pub fn last_proportions(&self) -> &[f64] {
        &self.row
    }

    pub fn step(&mut self) -> Result<&GammaSetupState> {
        let n = self.state.n + 1;
        let e = exp1(&mut self.right);
        let e_prime = exp1(&mut self.left);
        self.row.clear();
        let rng = &mut self.proportions;
        self.row.extend((0..n).map(|_| uniform(rng)));
        let ends = (self.state.points.left() - e_prime, self.state.points.right() + e);
        evolve_in_place(&mut self.state.points, &self.row, ends)?;
        self.state.n = n;
        self.last_e = (e, e_prime);
        Ok(&self.state)
    }

    pub fn run_to(&mut self, n: usize) -> Result<&GammaSetupState> {
        while self.state.n < n {
            self.step()?;
        }
        Ok(&self.state)
    }

    pub fn into_state(self) -> GammaSetupState {
        self.state
    }

    pub fn trace(&self) -> GammaStep {
        GammaStep {
            n: self.state.n,
            proportions: self.row.clone(),
            e_right: self.last_e.0,
            e_left: self.last_e.1,
        }
    }
}

/// The setup at step `n` for stream `(seed, stream_id)`.
pub fn run_gamma_setup(n: usize, stream: RngStream) -> Result<GammaSetupState> {
    let mut run = GammaRun::new(stream);
    run.run_to(n)?;
    Ok(run.into_state())
}

/// `max_k` deviation from
/// `I[n+1][k] = (1 - P[n+1][k+1]) I[n][k] + P[n+1][k] I[n][k-1]`,
/// with `I[n+1][0] = (1 - P[n+1][1]) I[n][0] + E'_{n+1}` and
/// `I[n+1][n+1] = E_{n+1} + P[n+1][n+1] I[n][n]`.
pub fn spacing_identity_gap(prev: &[f64], next: &[f64], step: &GammaStep) -> Result<f64> {
    let n = prev.len() - 1;
    if next.len() != n + 2 || step.proportions.len() != n + 1 {
        return Err(Error::DimensionMismatch {
            step: n + 1,
            expected: n + 2,
            got: next.len(),
        });
    }
    let p = |k: usize| step.proportions[k - 1];
    let mut gap = 0.0f64;
    for k in 0..=n + 1 {
        let keep = if k <= n {
            (1.0 - p(k + 1)) * prev[k]
        } else {
            step.e_right
        };
        let moved = if k >= 1 { p(k) * prev[k - 1] } else { step.e_left };
        gap = gap.max((next[k] - keep - moved).abs());
    }
    Ok(gap)
}

/// Pooled spacings of `R` runs at step `n` against Γ₂: KS, mean 2, variance 2,
/// and the lag-1 autocorrelation within runs below `4 / sqrt(R n)`.
pub fn spacing_gamma_test<E: Executor>(
    n: usize,
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<(Vec<f64>, Report)> {
    let pooled_len = replications * (n + 1);
    if pooled_len < 10_000 {
        return Err(Error::InsufficientSamples {
            needed: 10_000,
            got: pooled_len,
        });
    }
    let runs: Vec<Vec<f64>> = exec
        .map(replications, |r| {
            run_gamma_setup(n, RngStream::new(seed, r as u64)).map(|s| s.spacings())
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let pooled: Vec<f64> = runs.iter().flatten().copied().collect();
    let mut report = Report::new();
    let ks = ks_one_sample(&pooled, &ClosedFormDist::Gamma2)?;
    report.push(Check::below(
        "ks_spacings_gamma2",
        n,
        replications,
        ks.statistic,
        ks.threshold,
    ));
    report.push(check_mean("spacings_mean", &pooled, 2.0)?.to_check(n, replications));
    report.push(check_variance("spacings_variance", &pooled, 2.0)?.to_check(n, replications));
    if n >= 1 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = runs.iter().flat_map(|s| s.windows(2).map(|w| (w[0], w[1]))).unzip();
        let rho = correlation(&xs, &ys);
        report.push(Check::below(
            "spacings_lag1_correlation",
            n,
            replications,
            rho.abs(),
            4.0 / ((replications * n) as f64).sqrt(),
        ));
    }
    Ok((pooled, report.finish()))
}

fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Indices `1, ceil(n/2), n`, deduplicated.
pub fn order_statistic_indices(n: usize) -> Vec<usize> {
    let mut ks = alloc::vec![1, n.div_ceil(2), n];
    ks.dedup();
    ks
}

/// `alpha[n][k]` at `k = 1, ceil(n/2), n` against simulated `U_(2k)` of
/// `2n + 1` uniforms (two-sample KS), plus the means `k / (n + 1)`.
pub fn order_statistics_check<E: Executor>(n: usize, replications: usize, seed: u64, exec: &E) -> Result<Report> {
    if n == 0 {
        return Err(Error::param("n", 0.0, "must be positive"));
    }
    let ks = order_statistic_indices(n);
    let observed: Vec<Vec<f64>> = exec
        .map(replications, |r| {
            let state = run_gamma_setup(n, RngStream::new(seed, r as u64))?;
            let atoms = normalize(&state.points)?.atoms;
            Ok(ks.iter().map(|&k| atoms[k - 1]).collect())
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let reference: Vec<Vec<f64>> = exec.map(replications, |r| {
        let mut rng = RngStream::new(seed, r as u64).rng(Substream::Reference);
        let mut u: Vec<f64> = (0..2 * n + 1).map(|_| uniform(&mut rng)).collect();
        u.sort_by(f64::total_cmp);
        ks.iter().map(|&k| u[2 * k - 1]).collect()
    });
    let mut report = Report::new();
    for (j, &k) in ks.iter().enumerate() {
        let a: Vec<f64> = observed.iter().map(|v| v[j]).collect();
        let b: Vec<f64> = reference.iter().map(|v| v[j]).collect();
        let out = ks_two_sample(&a, &b)?;
        report.push(Check::below(
            format!("ks_order_statistic_k{k}"),
            n,
            replications,
            out.statistic,
            out.threshold,
        ));
        report.push(
            check_mean(format!("order_statistic_mean_k{k}"), &a, k as f64 / (n + 1) as f64)?.to_check(n, replications),
        );
    }
    Ok(report.finish())
}

pub const UNIFORM_LIMIT_TOLERANCE: f64 = 0.02;
pub const UNIFORM_LIMIT_FRACTION: f64 = 0.95;

/// Runs the setup `runs` times to step `n` and records `sup |G_n[0, t] - t|`
/// for each. Passes when at least `min_fraction` of the distances are below `tol`.
pub fn uniform_limit_check<E: Executor>(
    n: usize,
    runs: usize,
    tol: f64,
    min_fraction: f64,
    seed: u64,
    exec: &E,
) -> Result<(Vec<f64>, Report)> {
    if n == 0 || runs == 0 {
        return Err(Error::param("n", n as f64, "n and runs must be positive"));
    }
    let distances: Vec<f64> = exec
        .map(runs, |r| {
            let state = run_gamma_setup(n, RngStream::new(seed, r as u64))?;
            let sorted = sorted_sample(&normalize(&state.points)?.atoms)?;
            Ok(ks_distance(&sorted, &ClosedFormDist::Uniform01))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let below = distances.iter().filter(|&&d| d < tol).count() as f64 / runs as f64;
    let mut report = Report::new();
    report.push(Check::at_least("uniform_limit_fraction", n, runs, below, min_fraction));
    Ok((distances, report.finish()))
}

/// `Z_n(t) = sqrt(2n+1) (G_n[0, t] - t)` for each run (rows) and each `t` (columns).
pub fn fluctuation_samples<E: Executor>(
    n: usize,
    grid: &[f64],
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::param("n", 0.0, "must be positive"));
    }
    if let Some(&t) = grid.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::param("t", t, "must lie in (0, 1)"));
    }
    let scale = ((2 * n + 1) as f64).sqrt();
    exec.map(replications, |r| {
        let state = run_gamma_setup(n, RngStream::new(seed, r as u64))?;
        let mut atoms = normalize(&state.points)?.atoms;
        atoms.sort_by(f64::total_cmp);
        Ok(grid
            .iter()
            .map(|&t| {
                let below = atoms.partition_point(|&a| a <= t);
                scale * (below as f64 / n as f64 - t)
            })
            .collect())
    })
    .into_iter()
    .collect()
}

/// Brownian-bridge moments of `Z_n`: mean 0, variance `t(1-t)`, covariance
/// `s(1-t)` for `s < t`, each within four plug-in standard errors.
pub fn fluctuation_test<E: Executor>(
    n: usize,
    grid: &[f64],
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<(Vec<Vec<f64>>, Report)> {
    let z = fluctuation_samples(n, grid, replications, seed, exec)?;
    let column = |j: usize| -> Vec<f64> { z.iter().map(|row| row[j]).collect() };
    let mut report = Report::new();
    let mut push = |c: MomentCheck| report.push(c.to_check(n, replications));
    for (j, &t) in grid.iter().enumerate() {
        let zt = column(j);
        push(check_mean(format!("bridge_mean_t{t}"), &zt, 0.0)?);
        push(check_variance(format!("bridge_variance_t{t}"), &zt, t * (1.0 - t))?);
        for (i, &s) in grid.iter().enumerate().take(j) {
            let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
            push(check_covariance(
                format!("bridge_covariance_s{s}_t{t}"),
                &column(i),
                &zt,
                lo * (1.0 - hi),
            )?);
        }
    }
    Ok((z, report.finish()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryKind, BoundarySpec};
    use crate::exec::Sequential;
    use crate::partition::Evolver;
    use crate::split::{SplitLaw, SplitSpec};
    use approx::assert_abs_diff_eq;

    #[test]
    fn base_case() {
        let s = run_gamma_setup(0, RngStream::new(1, 0)).unwrap();
        let i = s.spacings();
        assert_eq!(i.len(), 1);
        assert!(i[0] > 0.0);
        let mut right = RngStream::new(1, 0).rng(Substream::BoundaryRight);
        let mut left = RngStream::new(1, 0).rng(Substream::BoundaryLeft);
        assert_abs_diff_eq!(i[0], exp1(&mut right) + exp1(&mut left), epsilon = 1e-15);
    }

    #[test]
    fn matches_the_generic_evolver() {
        let stream = RngStream::new(17, 3);
        let bspec = BoundarySpec::new(BoundaryKind::PoissonArrivals, 1.0, 0.5).unwrap();
        let split = SplitSpec::FullyRandom(SplitLaw::Uniform);
        let mut ev = Evolver::from_specs(&bspec, &split, 40, Some(stream)).unwrap();
        let a = ev.run_to(40).unwrap().clone();
        let b = run_gamma_setup(40, stream).unwrap();
        assert_eq!(a, b.points);
    }

    #[test]
    fn spacing_identity_holds_pathwise() {
        let mut run = GammaRun::new(RngStream::new(2, 0));
        for _ in 0..200 {
            let prev = run.state().spacings();
            let next = run.step().unwrap().spacings();
            let gap = spacing_identity_gap(&prev, &next, &run.trace()).unwrap();
            let scale = next.iter().fold(1.0f64, |m, &x| m.max(x));
            assert!(gap <= 1e-12 * scale, "gap {gap}");
            assert!(next.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn boundaries_are_strictly_monotone() {
        let mut run = GammaRun::new(RngStream::new(3, 0));
        let mut prev = run.state().points.clone();
        for _ in 0..100 {
            let next = run.step().unwrap().points.clone();
            assert!(next.left() < prev.left() && next.right() > prev.right());
            prev = next;
        }
    }

    #[test]
    fn right_end_has_mean_n_plus_one() {
        let ends: Vec<f64> = (0..20_000)
            .map(|r| run_gamma_setup(9, RngStream::new(4, r)).unwrap().points.right())
            .collect();
        // Var(S_9) = 10.
        let c = MomentCheck::new("m", mean(&ends), 10.0, (10.0f64 / 20_000.0).sqrt());
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn spacing_law() {
        let (pooled, rep) = spacing_gamma_test(50, 500, 5, &Sequential).unwrap();
        assert_eq!(pooled.len(), 25_500);
        assert!(rep.pass(), "{rep:#?}");
        assert!(spacing_gamma_test(5, 10, 5, &Sequential).is_err());
    }

    #[test]
    fn order_statistics() {
        assert_eq!(order_statistic_indices(1), alloc::vec![1]);
        assert_eq!(order_statistic_indices(7), alloc::vec![1, 4, 7]);
        let rep = order_statistics_check(7, 10_000, 6, &Sequential).unwrap();
        assert!(rep.pass(), "{rep:#?}");
    }

    #[test]
    fn uniform_limit() {
        let (d, rep) = uniform_limit_check(2000, 20, 0.05, 0.95, 9, &Sequential).unwrap();
        assert_eq!(d.len(), 20);
        assert!(rep.pass(), "{d:?}");
    }

    #[test]
    fn small_bridge() {
        let (z, rep) = fluctuation_test(100, &[0.25, 0.5, 0.75], 10_000, 8, &Sequential).unwrap();
        assert_eq!(z.len(), 10_000);
        assert!(rep.pass(), "{rep:#?}");
        assert!(fluctuation_samples(10, &[0.0], 10, 1, &Sequential).is_err());
    }
}
