//! Fragmentation of partitions of the real line, the stationary Γ₂ renewal
//! process, the two-coordinate chain `X¹` and the windowed chain on `[l, m]`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
// Inherent float methods shadow these whenever std is linked into the build.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::gamma::run_gamma_setup;
use crate::report::{Check, Report};
use crate::rng::{RngStream, Substream, bernoulli, exp1, gamma2, uniform};
use crate::stats::dist::ClosedFormDist;
use crate::stats::ks::{critical_one_sample, ks_one_sample, ks_two_sample};
use crate::stats::moments::{MomentCheck, check_mean, mean, variance};

/// Backward and forward distances from the origin to the two points of the
/// stationary process that straddle it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPair {
    pub backward: f64,
    pub forward: f64,
}

impl StationaryPair {
    pub fn from_parts(flip: bool, gamma: f64, exp: f64) -> Self {
        if flip {
            StationaryPair {
                backward: exp,
                forward: gamma,
            }
        } else {
            StationaryPair {
                backward: gamma,
                forward: exp,
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let flip = bernoulli(rng, 0.5);
        let gamma = gamma2(rng);
        let exp = exp1(rng);
        StationaryPair::from_parts(flip, gamma, exp)
    }
}

/// A finite strictly increasing window of a configuration of the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineConfig {
    pub points: Vec<f64>,
    /// `i` with `points[i] <= 0 < points[i + 1]`, when such an `i` exists.
    pub origin_index: Option<usize>,
}

impl LineConfig {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Precondition(format!(
                "a line configuration needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::BoundaryNotMonotone {
                step: 0,
                index: i + 1,
                value: points[i + 1],
                previous: points[i],
            });
        }
        let origin_index = origin_index(&points);
        Ok(LineConfig { points, origin_index })
    }

    /// `(-x_0, x_1)` when the window straddles the origin.
    pub fn origin_pair(&self) -> Option<StationaryPair> {
        self.origin_index.map(|i| StationaryPair {
            backward: -self.points[i],
            forward: self.points[i + 1],
        })
    }

    /// Spacing `x_k - x_{k-1}` with `k` counted from the origin pair (`k = 1` is the pair itself).
    pub fn spacing(&self, k: isize) -> Option<f64> {
        let o = self.origin_index? as isize;
        let hi = o + k;
        if hi < 1 || hi as usize >= self.points.len() {
            return None;
        }
        Some(self.points[hi as usize] - self.points[hi as usize - 1])
    }
}

fn origin_index(points: &[f64]) -> Option<usize> {
    let i = points.partition_point(|&x| x <= 0.0);
    (i >= 1 && i < points.len()).then(|| i - 1)
}

/// One fragmentation step of the window `x_1 < ... < x_N`: interior points
/// `p_k x_{k-1} + (1 - p_k) x_k` for `k = 2..=N`, plus the points
/// `x_1 - e_left` and `x_N + e_right` split off the exterior intervals.
pub fn fragment_line_step_with(
    config: &LineConfig,
    proportions: &[f64],
    e_left: f64,
    e_right: f64,
) -> Result<LineConfig> {
    let x = &config.points;
    if x.len() < 2 {
        return Err(Error::Precondition(format!(
            "a line configuration needs at least 2 points, got {}",
            x.len()
        )));
    }
    if proportions.len() != x.len() - 1 {
        return Err(Error::DimensionMismatch {
            step: 1,
            expected: x.len() - 1,
            got: proportions.len(),
        });
    }
    if let Some((i, &p)) = proportions.iter().enumerate().find(|(_, p)| !(**p > 0.0 && **p < 1.0)) {
        return Err(Error::ProportionOutOfRange {
            step: 1,
            index: i + 1,
            value: p,
        });
    }
    if !(e_left > 0.0 && e_right > 0.0) {
        return Err(Error::Precondition(String::from(
            "exterior increments must be positive",
        )));
    }
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(x[0] - e_left);
    out.extend(
        proportions
            .iter()
            .zip(x.windows(2))
            .map(|(p, w)| p * w[0] + (1.0 - p) * w[1]),
    );
    out.push(x[x.len() - 1] + e_right);
    LineConfig::new(out)
}

pub fn fragment_line_step<R: Rng + ?Sized>(config: &LineConfig, rng: &mut R) -> Result<LineConfig> {
    let proportions: Vec<f64> = (1..config.points.len()).map(|_| open_unit(rng)).collect();
    let e_left = exp1(rng);
    let e_right = exp1(rng);
    fragment_line_step_with(config, &proportions, e_left, e_right)
}

fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = uniform(rng);
        if u > 0.0 {
            return u;
        }
    }
}

/// `X¹` with given `U` and `E`. A split landing exactly at the origin takes the second branch.
pub fn chain_x1_step_with(b: f64, t: f64, u: f64, e: f64) -> Result<(f64, f64)> {
    if !(b > 0.0 && t > 0.0) {
        return Err(Error::NonPositiveState { b, t });
    }
    let split = -u * b + (1.0 - u) * t;
    if split > 0.0 {
        Ok((b + e, split))
    } else {
        Ok((-split, t + e))
    }
}

pub fn chain_x1_step<R: Rng + ?Sized>(b: f64, t: f64, rng: &mut R) -> Result<(f64, f64)> {
    let u = uniform(rng);
    let e = exp1(rng);
    chain_x1_step_with(b, t, u, e)
}

/// `x¹ < l < x² < ... < x^{N-1} < m < x^N`, `N >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowState {
    pub l: f64,
    pub m: f64,
    pub points: Vec<f64>,
}

impl WindowState {
    pub fn new(l: f64, m: f64, points: Vec<f64>) -> Result<Self> {
        let w = WindowState { l, m, points };
        w.validate()?;
        Ok(w)
    }

    /// Interior points may sit exactly on `l` or `m`; that only happens on a null event.
    pub fn validate(&self) -> Result<()> {
        check_window(self.l, self.m)?;
        let x = &self.points;
        let n = x.len();
        let bad = |msg: String| Err(Error::Precondition(msg));
        if n < 2 {
            return bad(format!("window state needs at least 2 points, got {n}"));
        }
        if !(x[0] < self.l) {
            return bad(format!("first point {} is not below l = {}", x[0], self.l));
        }
        if !(x[n - 1] > self.m) {
            return bad(format!("last point {} is not above m = {}", x[n - 1], self.m));
        }
        if let Some(i) = x[1..n - 1].iter().position(|&v| !(self.l <= v && v <= self.m)) {
            return bad(format!(
                "interior point {} at index {} lies outside [l, m]",
                x[i + 1],
                i + 1
            ));
        }
        if let Some(i) = x.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::BoundaryNotMonotone {
                step: 0,
                index: i + 1,
                value: x[i + 1],
                previous: x[i],
            });
        }
        Ok(())
    }

    /// Number of points inside `[l, m]`.
    pub fn interior_count(&self) -> usize {
        self.points.len() - 2
    }

    /// `V(x) = l - x¹ + 1`.
    pub fn lyapunov(&self) -> f64 {
        self.l - self.points[0] + 1.0
    }

    pub fn config(&self) -> LineConfig {
        LineConfig {
            points: self.points.clone(),
            origin_index: origin_index(&self.points),
        }
    }

    /// Keeps the last point below `l`, everything in between, and the first point above `m`.
    pub fn trim(l: f64, m: f64, sorted: &[f64]) -> Result<Self> {
        let first = sorted.partition_point(|&x| x < l);
        let last = sorted.partition_point(|&x| x <= m);
        if first == 0 || last == sorted.len() {
            return Err(Error::Precondition(format!(
                "points do not extend past both ends of [{l}, {m}]"
            )));
        }
        WindowState::new(l, m, sorted[first - 1..=last].to_vec())
    }
}

fn check_window(l: f64, m: f64) -> Result<()> {
    if !(l.is_finite() && m.is_finite() && l < m) {
        return Err(Error::InvalidWindow(format!("need finite l < m, got l = {l}, m = {m}")));
    }
    Ok(())
}

/// Windowed chain step with explicit proportions `U_k` (`k = 2..=N`) and exterior increments.
pub fn chain_window_step_with(
    state: &WindowState,
    proportions: &[f64],
    e_left: f64,
    e_right: f64,
) -> Result<WindowState> {
    state.validate()?;
    let next = fragment_line_step_with(&state.config(), proportions, e_left, e_right)?;
    WindowState::trim(state.l, state.m, &next.points)
}

pub fn chain_window_step<R: Rng + ?Sized>(state: &WindowState, rng: &mut R) -> Result<WindowState> {
    let proportions: Vec<f64> = (1..state.points.len()).map(|_| open_unit(rng)).collect();
    let e_left = exp1(rng);
    let e_right = exp1(rng);
    chain_window_step_with(state, &proportions, e_left, e_right)
}

/// The stationary Γ₂ process around `[l, m]`: the origin pair from
/// [`StationaryPair`], then i.i.d. Γ₂ increments outward until one point lies
/// beyond each end.
pub fn sample_ngamma2<R: Rng + ?Sized>(l: f64, m: f64, rng: &mut R) -> Result<LineConfig> {
    Ok(sample_window(l, m, rng)?.config())
}

pub fn sample_window<R: Rng + ?Sized>(l: f64, m: f64, rng: &mut R) -> Result<WindowState> {
    check_window(l, m)?;
    let pair = StationaryPair::sample(rng);
    let mut right = alloc::vec![pair.forward];
    while right[right.len() - 1] <= m {
        let last = right[right.len() - 1];
        right.push(last + gamma2(rng));
    }
    let mut left = alloc::vec![-pair.backward];
    while left[left.len() - 1] >= l {
        let last = left[left.len() - 1];
        left.push(last - gamma2(rng));
    }
    left.reverse();
    left.extend(right);
    WindowState::trim(l, m, &left)
}

/// Summary of a window at the end of a run, relative to the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSummary {
    pub backward: f64,
    pub forward: f64,
    /// `x_0 - x_{-1}`, if `x_{-1}` lies in the window.
    pub left_neighbour: Option<f64>,
    /// `x_2 - x_1`, if `x_2` lies in the window.
    pub right_neighbour: Option<f64>,
    pub interior_count: usize,
}

fn summarize(state: &WindowState) -> Result<WindowSummary> {
    let config = state.config();
    let pair = config
        .origin_pair()
        .ok_or_else(|| Error::InvalidWindow(format!("[{}, {}] does not contain the origin", state.l, state.m)))?;
    Ok(WindowSummary {
        backward: pair.backward,
        forward: pair.forward,
        left_neighbour: config.spacing(0),
        right_neighbour: config.spacing(2),
        interior_count: state.interior_count(),
    })
}

/// Stationary start, then `steps` windowed chain steps. Returns every state.
pub fn window_trajectory(l: f64, m: f64, steps: usize, stream: RngStream) -> Result<Vec<WindowState>> {
    let mut init = stream.rng(Substream::Initial);
    let mut chain = stream.rng(Substream::Chain);
    let mut states = Vec::with_capacity(steps + 1);
    states.push(sample_window(l, m, &mut init)?);
    for _ in 0..steps {
        let next = chain_window_step(&states[states.len() - 1], &mut chain)?;
        states.push(next);
    }
    Ok(states)
}

fn final_window(l: f64, m: f64, steps: usize, stream: RngStream) -> Result<WindowState> {
    let mut init = stream.rng(Substream::Initial);
    let mut chain = stream.rng(Substream::Chain);
    let mut state = sample_window(l, m, &mut init)?;
    for _ in 0..steps {
        state = chain_window_step(&state, &mut chain)?;
    }
    Ok(state)
}

/// Starts `R` windows from the stationary law, runs `steps` windowed chain
/// steps, then checks: origin pair marginals against survival
/// `e^{-t}(1 + t/2)`, the origin spacing against Γ₃, neighbouring spacings
/// against Γ₂, the interior count mean `(m - l)/2`, and reflection symmetry.
pub fn invariance_test_ngamma2<E: Executor>(
    l: f64,
    m: f64,
    steps: usize,
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<Report> {
    check_window(l, m)?;
    if !(l < 0.0 && 0.0 < m) {
        return Err(Error::InvalidWindow(format!("need l < 0 < m, got l = {l}, m = {m}")));
    }
    let summaries: Vec<WindowSummary> = exec
        .map(replications, |r| {
            summarize(&final_window(l, m, steps, RngStream::new(seed, r as u64))?)
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let back: Vec<f64> = summaries.iter().map(|s| s.backward).collect();
    let fwd: Vec<f64> = summaries.iter().map(|s| s.forward).collect();
    let mut report = Report::new();
    let mut ks = |name: &str, xs: &[f64], dist: &ClosedFormDist| -> Result<()> {
        let out = ks_one_sample(xs, dist)?;
        report.push(Check::below(
            format!("ks_{name}"),
            steps,
            replications,
            out.statistic,
            out.threshold,
        ));
        Ok(())
    };
    ks("origin_backward", &back, &ClosedFormDist::MixGamma2Exp)?;
    ks("origin_forward", &fwd, &ClosedFormDist::MixGamma2Exp)?;
    let gap: Vec<f64> = back.iter().zip(&fwd).map(|(b, t)| b + t).collect();
    ks("origin_spacing_gamma3", &gap, &ClosedFormDist::Gamma3)?;
    let left: Vec<f64> = summaries.iter().filter_map(|s| s.left_neighbour).collect();
    let right: Vec<f64> = summaries.iter().filter_map(|s| s.right_neighbour).collect();
    ks("left_neighbour_spacing", &left, &ClosedFormDist::Gamma2)?;
    ks("right_neighbour_spacing", &right, &ClosedFormDist::Gamma2)?;

    let sym = ks_two_sample(&back, &fwd)?;
    report.push(Check::below(
        "ks_origin_symmetry",
        steps,
        replications,
        sym.statistic,
        sym.threshold,
    ));
    let diff: Vec<f64> = back.iter().zip(&fwd).map(|(b, t)| t - b).collect();
    let mirrored: Vec<f64> = diff.iter().map(|d| -d).collect();
    let sym = ks_two_sample(&diff, &mirrored)?;
    report.push(Check::below(
        "ks_origin_reflection",
        steps,
        replications,
        sym.statistic,
        sym.threshold,
    ));

    let counts: Vec<f64> = summaries.iter().map(|s| (s.interior_count + 2) as f64).collect();
    report.push(check_mean("window_count_mean", &counts, (m - l) / 2.0 + 2.0)?.to_check(steps, replications));
    Ok(report.finish())
}

pub const X1_KS_FACTOR: f64 = 1.5;

/// Runs `X¹` from the stationary pair for `steps` steps, recording every state.
pub fn x1_trajectory(steps: usize, stream: RngStream) -> Result<Vec<(f64, f64)>> {
    let pair = StationaryPair::sample(&mut stream.rng(Substream::Initial));
    let mut rng = stream.rng(Substream::Chain);
    let mut out = Vec::with_capacity(steps + 1);
    out.push((pair.backward, pair.forward));
    for _ in 0..steps {
        let (b, t) = out[out.len() - 1];
        out.push(chain_x1_step(b, t, &mut rng)?);
    }
    Ok(out)
}

/// Marginal invariance of `X¹` started from the stationary pair: KS of each
/// coordinate against `e^{-t}(1 + t/2)` after each step in `check_steps`,
/// with threshold `1.5 * 1.63 / sqrt(R)`, plus the fraction of first steps
/// that keep the right point.
pub fn x1_invariance_test<E: Executor>(
    check_steps: &[usize],
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<Report> {
    let steps = check_steps.iter().copied().max().unwrap_or(0);
    let paths: Vec<Vec<(f64, f64)>> = exec
        .map(replications, |r| x1_trajectory(steps, RngStream::new(seed, r as u64)))
        .into_iter()
        .collect::<Result<_>>()?;
    let threshold = X1_KS_FACTOR * critical_one_sample(replications);
    let mut report = Report::new();
    for &s in check_steps {
        let b: Vec<f64> = paths.iter().map(|p| p[s].0).collect();
        let t: Vec<f64> = paths.iter().map(|p| p[s].1).collect();
        for (name, xs) in [("backward", &b), ("forward", &t)] {
            let d = ks_one_sample(xs, &ClosedFormDist::MixGamma2Exp)?.statistic;
            report.push(Check::below(
                format!("ks_x1_{name}_step{s}"),
                s,
                replications,
                d,
                threshold,
            ));
        }
    }
    if steps >= 1 {
        // The first coordinate grows by E exactly when the split lands right of the origin.
        let kept: Vec<f64> = paths.iter().map(|p| if p[1].0 > p[0].0 { 1.0 } else { 0.0 }).collect();
        report.push(check_mean("x1_positive_split_fraction", &kept, 0.5)?.to_check(1, replications));
    }
    Ok(report.finish())
}

/// Piecewise-linear function through `knots`, zero outside `[x_first, x_last]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub name: String,
    pub knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(name: impl Into<String>, knots: Vec<(f64, f64)>) -> Result<Self> {
        let f = PiecewiseLinear {
            name: name.into(),
            knots,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "test function {} has no knots",
                self.name
            )));
        }
        if self.knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "test function {} has a non-finite knot",
                self.name
            )));
        }
        if self.knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidConfig(format!(
                "test function {} knots must be strictly increasing",
                self.name
            )));
        }
        Ok(())
    }

    /// Triangle on `[-2, 2]` with peak 1 at 0.
    pub fn triangle() -> Self {
        PiecewiseLinear {
            name: String::from("triangle"),
            knots: alloc::vec![(-2.0, 0.0), (0.0, 1.0), (2.0, 0.0)],
        }
    }

    /// Indicator of `[0, 4]`.
    pub fn plateau() -> Self {
        PiecewiseLinear {
            name: String::from("plateau"),
            knots: alloc::vec![(0.0, 1.0), (4.0, 1.0)],
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0].0, self.knots[self.knots.len() - 1].0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return 0.0;
        }
        let i = self.knots.partition_point(|k| k.0 <= x);
        if i == self.knots.len() {
            return self.knots[i - 1].1;
        }
        let ((x0, y0), (x1, y1)) = (self.knots[i - 1], self.knots[i]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// `∫ f`, trapezoidal on the knots (exact).
    pub fn integral(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
            .sum()
    }

    pub fn apply(&self, points: &[f64]) -> f64 {
        points.iter().map(|&x| self.eval(x)).sum()
    }
}

pub const COVERAGE_FAILURE_LIMIT: f64 = 0.01;

/// Samples of `μ̃_n f` from the Poisson-boundary setup and `μ_Γ₂ f` from the
/// stationary process for each test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VagueSamples {
    pub name: String,
    pub setup: Vec<f64>,
    pub stationary: Vec<f64>,
}

/// Compares `μ̃_n f` with `μ_Γ₂ f` for each `f`: two-sample KS, means against
/// `∫ f / 2`, and the two variances against each other. Fails with
/// [`Error::SupportNotCovered`] when more than 1% of runs have boundaries inside `[l, m]`.
pub fn vague_convergence_test<E: Executor>(
    fs: &[PiecewiseLinear],
    window: (f64, f64),
    n: usize,
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<(Vec<VagueSamples>, Report)> {
    let (l, m) = window;
    check_window(l, m)?;
    for f in fs {
        f.validate()?;
        let (lo, hi) = f.support();
        if lo < l || hi > m {
            return Err(Error::InvalidConfig(format!(
                "support of {} is [{lo}, {hi}], not inside [{l}, {m}]",
                f.name
            )));
        }
    }
    let runs: Vec<(bool, Vec<f64>, Vec<f64>)> = exec
        .map(replications, |r| {
            let stream = RngStream::new(seed, r as u64);
            let state = run_gamma_setup(n, stream)?;
            let covered = state.points.left() < l && state.points.right() > m;
            let setup: Vec<f64> = fs.iter().map(|f| f.apply(state.points.interior())).collect();
            let window = sample_window(l, m, &mut stream.rng(Substream::Reference))?;
            let stationary: Vec<f64> = fs.iter().map(|f| f.apply(&window.points)).collect();
            Ok((covered, setup, stationary))
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let failures = runs.iter().filter(|r| !r.0).count();
    if failures as f64 > COVERAGE_FAILURE_LIMIT * replications as f64 {
        return Err(Error::SupportNotCovered {
            lo: l,
            hi: m,
            failures,
            replications,
        });
    }
    let mut report = Report::new();
    if failures > 0 {
        report.note(format!("{failures} of {replications} runs did not cover [{l}, {m}]"));
    }
    let mut samples = Vec::with_capacity(fs.len());
    for (j, f) in fs.iter().enumerate() {
        let a: Vec<f64> = runs.iter().map(|r| r.1[j]).collect();
        let b: Vec<f64> = runs.iter().map(|r| r.2[j]).collect();
        let name = &f.name;
        let ks = ks_two_sample(&a, &b)?;
        report.push(Check::below(
            format!("ks_vague_{name}"),
            n,
            replications,
            ks.statistic,
            ks.threshold,
        ));
        let target = f.integral() / 2.0;
        report.push(check_mean(format!("vague_mean_setup_{name}"), &a, target)?.to_check(n, replications));
        report.push(check_mean(format!("vague_mean_stationary_{name}"), &b, target)?.to_check(n, replications));
        report.push(variance_gap(format!("vague_variance_gap_{name}"), &a, &b).to_check(n, replications));
        samples.push(VagueSamples {
            name: name.clone(),
            setup: a,
            stationary: b,
        });
    }
    Ok((samples, report.finish()))
}

/// `v_a - v_b` against 0 with the plug-in standard error of each sample variance.
fn variance_gap(name: String, a: &[f64], b: &[f64]) -> MomentCheck {
    let se2 = |xs: &[f64]| {
        let mu = mean(xs);
        let m2 = variance(xs);
        let m4 = xs.iter().map(|x| (x - mu).powi(4)).sum::<f64>() / xs.len() as f64;
        ((m4 - m2 * m2) / xs.len() as f64).max(0.0)
    };
    MomentCheck::new(name, variance(a) - variance(b), 0.0, (se2(a) + se2(b)).sqrt())
}

pub const DEFAULT_DRIFT_M: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub state: usize,
    pub v: f64,
    pub delta_v: f64,
    pub standard_error: f64,
    pub in_c: bool,
}

/// Drift of `V(x) = l - x¹ + 1` estimated at each state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftDiagnostic {
    pub m_factor: f64,
    pub rows: Vec<DriftRow>,
    /// Smallest `b >= 0` with `ΔV <= -V/3 + b` on `C = {l - x¹ <= M (m - l)}`.
    pub fitted_b: f64,
    /// Fraction of states outside `C` with `ΔV <= -V/3`.
    pub outside_c_fraction: Option<f64>,
    pub report: Report,
}

/// States for the drift diagnostic: the end of long windowed runs, and
/// copies of them with `x¹` pushed to `l - j M (m - l)` for `j = 1..=depths`.
pub fn drift_states(
    l: f64,
    m: f64,
    runs: usize,
    run_length: usize,
    m_factor: f64,
    depths: usize,
    seed: u64,
) -> Result<Vec<WindowState>> {
    let mut states = Vec::with_capacity(runs * (depths + 1));
    for r in 0..runs {
        let end = final_window(l, m, run_length, RngStream::new(seed, r as u64))?;
        for j in 1..=depths {
            let mut deep = end.clone();
            deep.points[0] = l - j as f64 * m_factor * (m - l);
            states.push(deep);
        }
        states.push(end);
    }
    Ok(states)
}

/// Monte Carlo `ΔV(x) = E[V(X_1) | X_0 = x] - V(x)` at each state, with the
/// fitted `b`. Diagnostic only: the report carries notes, no checks.
pub fn drift_diagnostic<E: Executor>(
    m_factor: f64,
    states: &[WindowState],
    replications: usize,
    seed: u64,
    exec: &E,
) -> Result<DriftDiagnostic> {
    if !(m_factor > 0.0) {
        return Err(Error::param("M", m_factor, "must be positive"));
    }
    if replications < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: replications,
        });
    }
    let rows: Vec<DriftRow> = exec
        .map(states.len(), |i| {
            let x = &states[i];
            let mut rng = RngStream::new(seed, i as u64).rng(Substream::Probe);
            let v0 = x.lyapunov();
            let mut vs = Vec::with_capacity(replications);
            for _ in 0..replications {
                vs.push(chain_window_step(x, &mut rng)?.lyapunov() - v0);
            }
            Ok(DriftRow {
                state: i,
                v: v0,
                delta_v: mean(&vs),
                standard_error: (variance(&vs) / replications as f64).sqrt(),
                in_c: x.l - x.points[0] <= m_factor * (x.m - x.l),
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let fitted_b = rows
        .iter()
        .filter(|r| r.in_c)
        .map(|r| r.delta_v + r.v / 3.0)
        .fold(0.0f64, f64::max);
    let outside: Vec<&DriftRow> = rows.iter().filter(|r| !r.in_c).collect();
    let outside_c_fraction = (!outside.is_empty())
        .then(|| outside.iter().filter(|r| r.delta_v <= -r.v / 3.0).count() as f64 / outside.len() as f64);
    let mut report = Report::new();
    report.note(format!(
        "drift diagnostic with M = {m_factor}: fitted b = {fitted_b:.6}"
    ));
    match outside_c_fraction {
        Some(f) => report.note(format!(
            "{} states outside C, fraction with dV <= -V/3: {f:.4}",
            outside.len()
        )),
        None => report.note("no states outside C"),
    }
    Ok(DriftDiagnostic {
        m_factor,
        rows,
        fitted_b,
        outside_c_fraction,
        report,
    })
}
