//! One function per subcommand: resolve parameters, run, collect CSV tables.

use fraglab_core::gamma::{
    GammaRun, UNIFORM_LIMIT_FRACTION, UNIFORM_LIMIT_TOLERANCE, fluctuation_test, order_statistics_check,
    run_gamma_setup, spacing_gamma_test, spacing_identity_gap, uniform_limit_check,
};
use fraglab_core::genfun::{HTable, h_cross_check, h_limit_check};
use fraglab_core::limit::{limit_cdf, limit_test};
use fraglab_core::line::{
    DEFAULT_DRIFT_M, PiecewiseLinear, drift_diagnostic, drift_states, invariance_test_ngamma2, vague_convergence_test,
    window_trajectory, x1_invariance_test, x1_trajectory,
};
use fraglab_core::markov::{ChainParams, alpha_exact, representation_check, tau_samples, tau_statistics};
use fraglab_core::partition::{evolve_last, normalize};
use fraglab_core::stats::Cdf;
use fraglab_core::{BoundaryKind, BoundarySpec, Check, Report, RngStream, SplitSpec};
use serde_json::{Value, json};

use crate::config::Params;
use crate::error::CliError;
use crate::exec::Parallel;
use crate::output::{OutputFile, Table, to_value};

/// Every subcommand except `all`, in the order `all` runs them.
pub const COMMANDS: [&str; 10] = [
    "evolve",
    "alpha",
    "limit-test",
    "tau-test",
    "genfun",
    "gamma-setup",
    "line-invariance",
    "vague-convergence",
    "x1-invariance",
    "drift",
];

/// Tolerance of the exact identities (lattice, representation, recursions).
pub const EXACT_TOLERANCE: f64 = 1e-10;

pub struct Outcome {
    pub report: Report,
    pub files: Vec<OutputFile>,
    pub effective: Value,
}

pub fn run(command: &str, p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    match command {
        "evolve" => evolve(p, seed),
        "alpha" => alpha(p, seed, exec),
        "limit-test" => limit(p, seed),
        "tau-test" => tau(p, seed, exec),
        "genfun" => genfun(p),
        "gamma-setup" => gamma(p, seed, exec),
        "line-invariance" => line_invariance(p, seed, exec),
        "vague-convergence" => vague(p, seed, exec),
        "x1-invariance" => x1(p, seed, exec),
        "drift" => drift(p, seed, exec),
        other => Err(CliError::config("subcommand", format!("unknown subcommand {other:?}"))),
    }
}

fn need_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::config("seed", "this subcommand is stochastic; pass --seed"))
}

fn single_n(p: &Params, default: usize) -> Result<usize, CliError> {
    match p.n.as_deref() {
        None => Ok(default),
        Some([n]) => Ok(*n),
        Some(ns) => Err(CliError::config(
            "n",
            format!("expected a single value, got {} values", ns.len()),
        )),
    }
}

fn positive(field: &str, value: usize) -> Result<usize, CliError> {
    if value == 0 {
        return Err(CliError::config(field, "must be positive"));
    }
    Ok(value)
}

/// Independent seeds for the separate experiments of one subcommand.
fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn boundary_or_default(p: &Params) -> Result<BoundarySpec, CliError> {
    match &p.boundary {
        Some(b) => Ok(b.0.clone()),
        None => Ok(BoundarySpec::power(1.0, 1.0, 0.5)?),
    }
}

fn split_or_default(p: &Params) -> Result<SplitSpec, CliError> {
    match &p.split {
        Some(s) => Ok(s.0.clone()),
        None => Ok(SplitSpec::constant(0.5)?),
    }
}

/// `--boundary`, or the canonical boundary of growth index `c`:
/// constant for 0, power law for finite `c`, exponential for `inf`.
fn regime_boundary(p: &Params) -> Result<BoundarySpec, CliError> {
    if let Some(b) = &p.boundary {
        for (field, set) in [("c", p.c.is_some()), ("q", p.q.is_some())] {
            if set {
                return Err(CliError::config(field, "conflicts with boundary"));
            }
        }
        return Ok(b.0.clone());
    }
    let c = p.c.unwrap_or(1.0);
    let q = p.q.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&q) {
        return Err(CliError::config("q", format!("must lie in [0, 1], got {q}")));
    }
    let kind = if c == 0.0 {
        BoundaryKind::Constant
    } else if c == f64::INFINITY {
        BoundaryKind::Exponential
    } else if c > 0.0 {
        BoundaryKind::PowerLaw { c }
    } else {
        return Err(CliError::config("c", format!("must be 0, positive or inf, got {c}")));
    };
    Ok(BoundarySpec::new(kind, 1.0, q)?)
}

fn regime_split(p: &Params) -> Result<SplitSpec, CliError> {
    if let Some(s) = &p.split {
        if p.pbar.is_some() {
            return Err(CliError::config("pbar", "conflicts with split"));
        }
        return Ok(s.0.clone());
    }
    let pbar = p.pbar.unwrap_or(0.5);
    SplitSpec::constant(pbar).map_err(|e| CliError::config("pbar", e.to_string()))
}

fn stochastic_seed(random: bool, seed: Option<u64>) -> Result<Option<u64>, CliError> {
    if random { need_seed(seed).map(Some) } else { Ok(seed) }
}

fn evolve(p: &Params, seed: Option<u64>) -> Result<Outcome, CliError> {
    p.check_fields("evolve", &["boundary", "split", "n"])?;
    let b = boundary_or_default(p)?;
    let s = split_or_default(p)?;
    let n = single_n(p, 100)?;
    let seed = stochastic_seed(b.is_random() || s.is_random(), seed)?;
    let bp = evolve_last(&b, &s, n, seed)?;
    let measure = normalize(&bp)?;
    let mut report = Report::new();
    let violations = bp.points.windows(2).filter(|w| !(w[0] <= w[1])).count();
    report.push(Check::at_most("break_points_monotone", n, 1, violations as f64, 0.0));
    let mut points = Table::new("points.csv", &["n", "k", "a"])?;
    for (k, a) in bp.points.iter().enumerate() {
        points.row((n, k, a))?;
    }
    let mut atoms = Table::new("measure.csv", &["n", "k", "alpha"])?;
    for (k, a) in measure.atoms.iter().enumerate() {
        atoms.row((n, k + 1, a))?;
    }
    Ok(Outcome {
        report,
        files: vec![points.finish()?, atoms.finish()?],
        effective: json!({"boundary": to_value(&b)?, "split": to_value(&s)?, "n": n}),
    })
}

fn alpha(p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    p.check_fields("alpha", &["boundary", "split", "n", "replications"])?;
    let b = boundary_or_default(p)?;
    let s = split_or_default(p)?;
    let n = single_n(p, 200)?;
    let seed = stochastic_seed(b.is_random() || s.is_random() || p.replications.is_some(), seed)?;
    let params = ChainParams::from_specs(&b, &s, n, seed.map(|s| RngStream::new(s, 0)))?;
    let alpha = alpha_exact(&params, n)?;
    let mut report = Report::new();
    let mono = alpha.windows(2).filter(|w| !(w[0] <= w[1])).count();
    report.push(Check::at_most("alpha_monotone", n, 1, mono as f64, 0.0));
    let ends = alpha[0].abs().max((alpha[n + 1] - 1.0).abs());
    report.push(Check::at_most("alpha_endpoints", n, 1, ends, EXACT_TOLERANCE));
    match params.boundary.endpoints(n) {
        Ok((left, right)) if (right - left).is_finite() => {
            let bp = evolve_last(&b, &s, n, seed)?;
            let l = right - left;
            let gap = alpha
                .iter()
                .zip(&bp.points)
                .map(|(a, x)| (left + a * l - x).abs())
                .fold(0.0, f64::max);
            report.push(Check::at_most(
                "representation_identity",
                n,
                1,
                gap,
                EXACT_TOLERANCE * l.abs().max(1.0),
            ));
        }
        _ => report.note(format!(
            "boundary length at n = {n} is not representable; identity check skipped"
        )),
    }
    if let Some(r) = p.replications {
        let r = positive("replications", r)?;
        report.extend(representation_check(
            &params,
            n,
            r,
            sub_seed(seed.unwrap_or(0), 1),
            exec,
        )?);
    }
    let mut table = Table::new("alpha.csv", &["n", "k", "alpha"])?;
    for (k, a) in alpha.iter().enumerate() {
        table.row((n, k, a))?;
    }
    Ok(Outcome {
        report: report.finish(),
        files: vec![table.finish()?],
        effective: json!({"boundary": to_value(&b)?, "split": to_value(&s)?, "n": n, "replications": p.replications}),
    })
}

pub const LIMIT_CSV_POINTS: usize = 200;

fn limit(p: &Params, seed: Option<u64>) -> Result<Outcome, CliError> {
    p.check_fields("limit-test", &["boundary", "split", "c", "q", "pbar", "n"])?;
    let b = regime_boundary(p)?;
    let s = regime_split(p)?;
    let ns = p.n.clone().unwrap_or_else(|| vec![1000, 10_000]);
    if ns.is_empty() || ns.contains(&0) {
        return Err(CliError::config("n", "need one or more positive steps"));
    }
    let seed = stochastic_seed(b.is_random() || s.is_random(), seed)?;
    let (law, measures, mut report) = limit_test(&b, &s, &ns, seed)?;
    report.note(format!(
        "limit law: {}",
        serde_json::to_string(&law).map_err(|e| CliError::Encode(e.to_string()))?
    ));
    let last = measures.last().expect("at least one n");
    let mut table = Table::new("limit.csv", &["t", "empirical_cdf", "limit_cdf"])?;
    for i in 0..=LIMIT_CSV_POINTS {
        let t = i as f64 / LIMIT_CSV_POINTS as f64;
        table.row((t, last.cdf(t), limit_cdf(&law, t)?))?;
    }
    Ok(Outcome {
        report,
        files: vec![table.finish()?],
        effective: json!({"boundary": to_value(&b)?, "split": to_value(&s)?, "n": ns}),
    })
}

fn tau(p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    p.check_fields(
        "tau-test",
        &["boundary", "split", "c", "q", "pbar", "n", "replications"],
    )?;
    let b = regime_boundary(p)?;
    let s = regime_split(p)?;
    let n = positive("n", single_n(p, 1000)?)?;
    let r = positive("replications", p.replications.unwrap_or(10_000))?;
    let seed = need_seed(seed)?;
    let params = ChainParams::from_specs(&b, &s, n, Some(RngStream::new(seed, 0)))?;
    let chain_seed = sub_seed(seed, 1);
    let report = tau_statistics(&params, n, r, chain_seed, exec)?;
    let samples = tau_samples(&params, n, r, chain_seed, exec)?;
    let mut table = Table::new("tau.csv", &["rep", "tau", "nu"])?;
    for (i, (t, nu)) in samples.iter().enumerate() {
        table.row((i, t, u8::from(*nu)))?;
    }
    Ok(Outcome {
        report,
        files: vec![table.finish()?],
        effective: json!({"boundary": to_value(&b)?, "split": to_value(&s)?, "n": n, "replications": r}),
    })
}

fn genfun(p: &Params) -> Result<Outcome, CliError> {
    p.check_fields("genfun", &["p", "n", "k_max", "tol", "cross_n"])?;
    let prob = p.p.unwrap_or(0.3);
    if !(prob > 0.0 && prob < 1.0) {
        return Err(CliError::config("p", format!("must lie in (0, 1), got {prob}")));
    }
    let n = single_n(p, 5000)?;
    let k_max = p.k_max.unwrap_or(10);
    let tol = p.tol.unwrap_or(1e-3);
    let cross_n = p.cross_n.unwrap_or(100);
    if n < 10 * k_max {
        return Err(CliError::config(
            "n",
            format!("must be at least 10 k_max = {}", 10 * k_max),
        ));
    }
    let (table, mut report) = h_limit_check(prob, k_max, n, tol)?;
    let mut h = HTable::start(prob)?;
    let mut worst = 0.0f64;
    while h.n < n {
        h.step();
        worst = worst.max((h.mass() - (h.n + 1) as f64).abs());
    }
    report.push(Check::at_most("h_mass_all_steps", n, 0, worst, 1e-9));
    let gap = h_cross_check(prob, cross_n).map_err(|e| CliError::config("cross_n", e.to_string()))?;
    report.push(Check::at_most("h_cross_check", cross_n, 0, gap, EXACT_TOLERANCE));
    report.note(format!(
        "edge targets 1/(2p) = {} and 1/(2(1-p)) = {}",
        1.0 / (2.0 * prob),
        1.0 / (2.0 * (1.0 - prob))
    ));
    let mut csv = Table::new("h.csv", &["n", "k", "H"])?;
    for (k, v) in table.values.iter().enumerate() {
        csv.row((n, k, v))?;
    }
    Ok(Outcome {
        report,
        files: vec![csv.finish()?],
        effective: json!({"p": prob, "n": n, "k_max": k_max, "tol": tol, "cross_n": cross_n}),
    })
}

fn gamma(p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    p.check_fields(
        "gamma-setup",
        &[
            "n",
            "replications",
            "bridge_n",
            "bridge_replications",
            "t_grid",
            "uniform_n",
            "uniform_runs",
            "trajectories",
        ],
    )?;
    let seed = need_seed(seed)?;
    let n = positive("n", single_n(p, 50)?)?;
    let r = positive("replications", p.replications.unwrap_or(1000))?;
    let bridge_n = positive("bridge_n", p.bridge_n.unwrap_or(500))?;
    let bridge_r = positive("bridge_replications", p.bridge_replications.unwrap_or(10_000))?;
    let grid = p.t_grid.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    if let Some(t) = grid.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(CliError::config(
            "t_grid",
            format!("points must lie in (0, 1), got {t}"),
        ));
    }
    let uniform_n = positive("uniform_n", p.uniform_n.unwrap_or(10_000))?;
    let uniform_runs = positive("uniform_runs", p.uniform_runs.unwrap_or(100))?;
    let trajectories = p.trajectories.unwrap_or(10).min(r);

    let mut report = Report::new();
    let mut run = GammaRun::new(RngStream::new(sub_seed(seed, 0), 0));
    let mut worst = 0.0f64;
    for _ in 0..n {
        let prev = run.state().spacings();
        let next = run.step()?.spacings();
        let scale = next.iter().fold(1.0f64, |a, &b| a.max(b));
        worst = worst.max(spacing_identity_gap(&prev, &next, &run.trace())? / scale);
    }
    report.push(Check::at_most("spacing_identity", n, 1, worst, 1e-12));

    let spacing_seed = sub_seed(seed, 1);
    let (_, spacing) =
        spacing_gamma_test(n, r, spacing_seed, exec).map_err(|e| CliError::config("replications", e.to_string()))?;
    report.extend(spacing);
    report.extend(order_statistics_check(n, bridge_r, sub_seed(seed, 2), exec)?);
    let (z, bridge) = fluctuation_test(bridge_n, &grid, bridge_r, sub_seed(seed, 3), exec)?;
    report.extend(bridge);
    let (_, uniform) = uniform_limit_check(
        uniform_n,
        uniform_runs,
        UNIFORM_LIMIT_TOLERANCE,
        UNIFORM_LIMIT_FRACTION,
        sub_seed(seed, 4),
        exec,
    )?;
    report.extend(uniform);

    let mut points = Table::new("points.csv", &["rep", "n", "k", "A"])?;
    for rep in 0..trajectories {
        let state = run_gamma_setup(n, RngStream::new(spacing_seed, rep as u64))?;
        for (k, a) in state.points.points.iter().enumerate() {
            points.row((rep, n, k, a))?;
        }
    }
    let mut fluct = Table::new("fluctuations.csv", &["rep", "t", "Z"])?;
    for (rep, row) in z.iter().enumerate() {
        for (t, v) in grid.iter().zip(row) {
            fluct.row((rep, t, v))?;
        }
    }
    Ok(Outcome {
        report: report.finish(),
        files: vec![points.finish()?, fluct.finish()?],
        effective: json!({
            "n": n, "replications": r, "bridge_n": bridge_n, "bridge_replications": bridge_r,
            "t_grid": grid, "uniform_n": uniform_n, "uniform_runs": uniform_runs, "trajectories": trajectories,
        }),
    })
}

fn window(p: &Params, l: f64, m: f64) -> Result<(f64, f64), CliError> {
    let (l, m) = (p.l.unwrap_or(l), p.m.unwrap_or(m));
    if !(l.is_finite() && m.is_finite() && l < m) {
        return Err(CliError::config(
            "l",
            format!("need finite l < m, got l = {l}, m = {m}"),
        ));
    }
    Ok((l, m))
}

fn suffixed(report: Report, suffix: &str) -> Report {
    Report {
        checks: report
            .checks
            .into_iter()
            .map(|mut c| {
                c.test = format!("{}_{suffix}", c.test);
                c
            })
            .collect(),
        notes: report.notes,
    }
}

fn line_invariance(p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    p.check_fields("line-invariance", &["l", "m", "steps", "replications", "trajectories"])?;
    let seed = need_seed(seed)?;
    let (l, m) = window(p, -4.0, 4.0)?;
    if !(l < 0.0 && m > 0.0) {
        return Err(CliError::config("l", "the window must contain the origin"));
    }
    let steps = p.steps.clone().unwrap_or_else(|| vec![1, 10, 50]);
    let r = positive("replications", p.replications.unwrap_or(10_000))?;
    let trajectories = p.trajectories.unwrap_or(5).min(r);
    let mut report = Report::new();
    for (i, &s) in steps.iter().enumerate() {
        let rep = invariance_test_ngamma2(l, m, s, r, sub_seed(seed, i as u64), exec)?;
        report.extend(suffixed(rep, &format!("steps{s}")));
    }
    let longest = steps.iter().copied().max().unwrap_or(0);
    let mut table = Table::new("trajectories.csv", &["rep", "step", "idx", "x"])?;
    for rep in 0..trajectories {
        let path = window_trajectory(l, m, longest, RngStream::new(sub_seed(seed, 100), rep as u64))?;
        for (step, state) in path.iter().enumerate() {
            for (idx, x) in state.points.iter().enumerate() {
                table.row((rep, step, idx, x))?;
            }
        }
    }
    Ok(Outcome {
        report: report.finish(),
        files: vec![table.finish()?],
        effective: json!({"l": l, "m": m, "steps": steps, "replications": r, "trajectories": trajectories}),
    })
}

fn vague(p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    p.check_fields("vague-convergence", &["l", "m", "n", "replications", "functions"])?;
    let seed = need_seed(seed)?;
    let (l, m) = window(p, -8.0, 8.0)?;
    let n = positive("n", single_n(p, 64)?)?;
    let r = positive("replications", p.replications.unwrap_or(10_000))?;
    let fs = p
        .functions
        .clone()
        .unwrap_or_else(|| vec![PiecewiseLinear::triangle(), PiecewiseLinear::plateau()]);
    if fs.is_empty() {
        return Err(CliError::config("functions", "need at least one test function"));
    }
    for f in &fs {
        f.validate().map_err(|e| CliError::config("functions", e.to_string()))?;
    }
    let (samples, report) = vague_convergence_test(&fs, (l, m), n, r, seed, exec)?;
    let mut table = Table::new("vague.csv", &["rep", "function", "setup", "stationary"])?;
    for rep in 0..r {
        for s in &samples {
            table.row((rep, &s.name, s.setup[rep], s.stationary[rep]))?;
        }
    }
    Ok(Outcome {
        report,
        files: vec![table.finish()?],
        effective: json!({"l": l, "m": m, "n": n, "replications": r, "functions": to_value(&fs)?}),
    })
}

fn x1(p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    p.check_fields("x1-invariance", &["steps", "replications", "trajectories"])?;
    let seed = need_seed(seed)?;
    let steps = p.steps.clone().unwrap_or_else(|| vec![1, 25]);
    let r = positive("replications", p.replications.unwrap_or(100_000))?;
    let trajectories = p.trajectories.unwrap_or(5).min(r);
    let report = x1_invariance_test(&steps, r, seed, exec)?;
    let longest = steps.iter().copied().max().unwrap_or(0);
    let mut table = Table::new("x1.csv", &["rep", "step", "b", "t"])?;
    for rep in 0..trajectories {
        for (step, (b, t)) in x1_trajectory(longest, RngStream::new(seed, rep as u64))?
            .iter()
            .enumerate()
        {
            table.row((rep, step, b, t))?;
        }
    }
    Ok(Outcome {
        report,
        files: vec![table.finish()?],
        effective: json!({"steps": steps, "replications": r, "trajectories": trajectories}),
    })
}

fn drift(p: &Params, seed: Option<u64>, exec: &Parallel) -> Result<Outcome, CliError> {
    p.check_fields(
        "drift",
        &["l", "m", "m_factor", "states", "run_length", "depths", "replications"],
    )?;
    let seed = need_seed(seed)?;
    let (l, m) = window(p, -1.0, 1.0)?;
    let m_factor = p.m_factor.unwrap_or(DEFAULT_DRIFT_M);
    if !(m_factor > 0.0 && m_factor.is_finite()) {
        return Err(CliError::config(
            "m_factor",
            format!("must be positive, got {m_factor}"),
        ));
    }
    let runs = positive("states", p.states.unwrap_or(20))?;
    let run_length = p.run_length.unwrap_or(200);
    let depths = p.depths.unwrap_or(3);
    let r = positive("replications", p.replications.unwrap_or(2000))?;
    let states = drift_states(l, m, runs, run_length, m_factor, depths, sub_seed(seed, 0))?;
    let d = drift_diagnostic(m_factor, &states, r, sub_seed(seed, 1), exec)?;
    let mut table = Table::new("drift.csv", &["state", "v", "delta_v", "standard_error", "in_c"])?;
    for row in &d.rows {
        table.row((row.state, row.v, row.delta_v, row.standard_error, u8::from(row.in_c)))?;
    }
    Ok(Outcome {
        report: d.report,
        files: vec![table.finish()?],
        effective: json!({
            "l": l, "m": m, "m_factor": m_factor, "states": runs, "run_length": run_length,
            "depths": depths, "replications": r, "fitted_b": d.fitted_b, "outside_c_fraction": d.outside_c_fraction,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{BoundaryArg, SplitArg};

    fn exec() -> Parallel {
        Parallel::new(Some(1)).unwrap()
    }

    #[test]
    fn seeds_differ() {
        let s: Vec<u64> = (0..5).map(|i| sub_seed(7, i)).collect();
        for i in 0..5 {
            for j in 0..i {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(sub_seed(7, 3), sub_seed(7, 3));
    }

    #[test]
    fn evolve_smoke() {
        let p = Params {
            boundary: Some("power:c=1,r=1".parse::<BoundaryArg>().unwrap()),
            split: Some("det:p=0.5".parse::<SplitArg>().unwrap()),
            n: Some(vec![100]),
            ..Params::default()
        };
        let out = run("evolve", &p, Some(7), &exec()).unwrap();
        assert!(out.report.pass());
        let text = String::from_utf8(out.files[0].bytes.clone()).unwrap();
        assert_eq!(text.lines().count(), 103);
        assert!(text.starts_with("n,k,a\n"));
    }

    #[test]
    fn seed_required_when_random() {
        let p = Params {
            split: Some("random:uniform".parse::<SplitArg>().unwrap()),
            n: Some(vec![10]),
            ..Params::default()
        };
        let e = run("evolve", &p, None, &exec()).err().unwrap();
        assert!(e.to_string().contains("seed"));
        assert_eq!(e.exit_code(), 2);
        assert!(run("evolve", &p, Some(1), &exec()).is_ok());
        let e = run("tau-test", &Params::default(), None, &exec()).err().unwrap();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn regime_boundaries() {
        let with_c = |c: f64| Params {
            c: Some(c),
            ..Params::default()
        };
        assert_eq!(regime_boundary(&with_c(0.0)).unwrap().kind, BoundaryKind::Constant);
        assert_eq!(
            regime_boundary(&with_c(f64::INFINITY)).unwrap().kind,
            BoundaryKind::Exponential
        );
        assert_eq!(
            regime_boundary(&with_c(2.0)).unwrap().kind,
            BoundaryKind::PowerLaw { c: 2.0 }
        );
        assert!(regime_boundary(&with_c(-1.0)).is_err());
        let both = Params {
            c: Some(1.0),
            boundary: Some("const".parse::<BoundaryArg>().unwrap()),
            ..Params::default()
        };
        assert!(regime_boundary(&both).unwrap_err().to_string().contains("c: conflicts"));
    }

    #[test]
    fn alpha_identity_and_fields() {
        let p = Params {
            boundary: Some("log:r=2,q=0.3".parse::<BoundaryArg>().unwrap()),
            split: Some("random:uniform".parse::<SplitArg>().unwrap()),
            n: Some(vec![150]),
            ..Params::default()
        };
        let out = run("alpha", &p, Some(3), &exec()).unwrap();
        assert!(out.report.pass(), "{:?}", out.report);
        assert!(out.report.find("representation_identity").is_some());
        let bad = Params {
            p: Some(0.5),
            ..Params::default()
        };
        let e = run("alpha", &bad, Some(1), &exec()).err().unwrap();
        assert!(e.to_string().contains("p: not used"), "{e}");
    }

    #[test]
    fn genfun_rejects_bad_p() {
        let p = Params {
            p: Some(1.0),
            ..Params::default()
        };
        let e = run("genfun", &p, None, &exec()).err().unwrap();
        assert!(e.to_string().contains("p: must lie"));
    }
}
