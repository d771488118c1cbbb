//! Experiment parameters from flags and TOML files.
//!
//! A config file holds top-level `seed` and `out` plus one table per
//! subcommand, keyed by the subcommand name:
//!
//! ```toml
//! seed = 7
//!
//! [limit-test]
//! c = 2.0
//! q = 0.4
//! pbar = 0.3
//! n = [1000, 10000]
//!
//! [vague-convergence]
//! functions = [{ name = "bump", knots = [[-1.0, 0.0], [0.0, 2.0], [1.0, 0.0]] }]
//! ```
//!
//! Flags given on the command line override the file.

use std::path::{Path, PathBuf};

use fraglab_core::line::PiecewiseLinear;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::CliError;
use crate::spec::{BoundaryArg, SplitArg};

fn one_or_many<'de, D, T>(d: D) -> Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Option::<OneOrMany<T>>::deserialize(d)?.map(|v| match v {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(xs) => xs,
    }))
}

macro_rules! params {
    ($( $(#[$meta:meta])* $field:ident : $ty:ty ),* $(,)?) => {
        /// Every tunable of every subcommand. Each subcommand accepts a subset.
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
        #[serde(default, deny_unknown_fields)]
        pub struct Params {
            $( $(#[$meta])* pub $field: Option<$ty>, )*
        }

        impl Params {
            /// `self` where set, `fallback` elsewhere.
            pub fn or(self, fallback: Params) -> Params {
                Params { $( $field: self.$field.or(fallback.$field), )* }
            }

            /// Names of the fields that are set.
            pub fn present(&self) -> Vec<&'static str> {
                let mut out = Vec::new();
                $( if self.$field.is_some() { out.push(stringify!($field)); } )*
                out
            }
        }
    };
}

params! {
    /// Boundary, e.g. `power:c=1,r=1`, `log:r=2`, `exp`, `poisson`.
    #[arg(long)]
    boundary: BoundaryArg,
    /// Split, e.g. `det:p=0.5`, `random:uniform`, `strat:power-right:a=2`.
    #[arg(long)]
    split: SplitArg,
    /// Step index; a comma-separated list for `limit-test`.
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    n: Vec<usize>,
    /// Monte Carlo replications.
    #[arg(long)]
    replications: usize,
    /// Regular-variation index of the boundary length (`0`, positive, or `inf`).
    #[arg(long)]
    c: f64,
    /// Right share of boundary growth.
    #[arg(long)]
    q: f64,
    /// Mean splitting proportion.
    #[arg(long)]
    pbar: f64,
    /// Splitting proportion for `genfun`.
    #[arg(long)]
    p: f64,
    /// Edge depth for `genfun`.
    #[arg(long)]
    k_max: usize,
    /// Edge tolerance for `genfun`.
    #[arg(long)]
    tol: f64,
    /// Size of the `genfun` cross check against the chain recursion.
    #[arg(long)]
    cross_n: usize,
    /// Step of the fluctuation and order-statistic runs.
    #[arg(long)]
    bridge_n: usize,
    /// Replications of the fluctuation and order-statistic runs.
    #[arg(long)]
    bridge_replications: usize,
    /// Points `t` in (0, 1) for the fluctuation test.
    #[arg(long, value_delimiter = ',')]
    t_grid: Vec<f64>,
    /// Step of the uniform-limit runs.
    #[arg(long)]
    uniform_n: usize,
    /// Number of uniform-limit runs.
    #[arg(long)]
    uniform_runs: usize,
    /// Number of replications written out as trajectories.
    #[arg(long)]
    trajectories: usize,
    /// Left end of the window.
    #[arg(long, allow_hyphen_values = true)]
    l: f64,
    /// Right end of the window.
    #[arg(long, allow_hyphen_values = true)]
    m: f64,
    /// Chain steps at which to test.
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    steps: Vec<usize>,
    /// Test functions as knot lists (config file only).
    #[arg(skip)]
    functions: Vec<PiecewiseLinear>,
    /// Size factor `M` of the set `C` in the drift diagnostic.
    #[arg(long)]
    m_factor: f64,
    /// Long runs that supply drift states.
    #[arg(long)]
    states: usize,
    /// Length of each long run.
    #[arg(long)]
    run_length: usize,
    /// Deep copies of each drift state outside `C`.
    #[arg(long)]
    depths: usize,
}

impl Params {
    /// Rejects fields that `command` does not read.
    pub fn check_fields(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        match self.present().into_iter().find(|f| !allowed.contains(f)) {
            Some(f) => Err(CliError::config(f, format!("not used by `{command}`"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub evolve: Option<Params>,
    pub alpha: Option<Params>,
    #[serde(rename = "limit-test")]
    pub limit_test: Option<Params>,
    #[serde(rename = "tau-test")]
    pub tau_test: Option<Params>,
    pub genfun: Option<Params>,
    #[serde(rename = "gamma-setup")]
    pub gamma_setup: Option<Params>,
    #[serde(rename = "line-invariance")]
    pub line_invariance: Option<Params>,
    #[serde(rename = "vague-convergence")]
    pub vague_convergence: Option<Params>,
    #[serde(rename = "x1-invariance")]
    pub x1_invariance: Option<Params>,
    pub drift: Option<Params>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config("config", e.to_string().trim_end().to_string()))
    }

    pub fn section(&self, command: &str) -> Option<&Params> {
        match command {
            "evolve" => self.evolve.as_ref(),
            "alpha" => self.alpha.as_ref(),
            "limit-test" => self.limit_test.as_ref(),
            "tau-test" => self.tau_test.as_ref(),
            "genfun" => self.genfun.as_ref(),
            "gamma-setup" => self.gamma_setup.as_ref(),
            "line-invariance" => self.line_invariance.as_ref(),
            "vague-convergence" => self.vague_convergence.as_ref(),
            "x1-invariance" => self.x1_invariance.as_ref(),
            "drift" => self.drift.as_ref(),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sections() {
        let c = ExperimentConfig::parse(
            r#"
seed = 7
[limit-test]
c = 2.0
n = [1000, 10000]
[genfun]
n = 50
[vague-convergence]
functions = [{ name = "bump", knots = [[-1.0, 0.0], [0.0, 2.0], [1.0, 0.0]] }]
"#,
        )
        .unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.section("limit-test").unwrap().n, Some(vec![1000, 10000]));
        assert_eq!(c.section("genfun").unwrap().n, Some(vec![50]));
        assert_eq!(
            c.section("vague-convergence").unwrap().functions.as_ref().unwrap()[0]
                .knots
                .len(),
            3
        );
        assert!(c.section("drift").is_none());
    }

    #[test]
    fn unknown_fields_are_named() {
        let e = ExperimentConfig::parse("[genfun]\nwidth = 3\n").unwrap_err();
        assert!(e.to_string().contains("width"), "{e}");
        let e = ExperimentConfig::parse("sed = 3\n").unwrap_err();
        assert!(e.to_string().contains("sed"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn precedence_and_field_check() {
        let cli = Params {
            n: Some(vec![5]),
            ..Params::default()
        };
        let file = Params {
            n: Some(vec![9]),
            p: Some(0.3),
            ..Params::default()
        };
        let merged = cli.or(file);
        assert_eq!(merged.n, Some(vec![5]));
        assert_eq!(merged.p, Some(0.3));
        assert_eq!(merged.present(), vec!["n", "p"]);
        assert!(merged.check_fields("genfun", &["n", "p"]).is_ok());
        let e = merged.check_fields("evolve", &["n"]).unwrap_err();
        assert!(e.to_string().contains("p: not used"), "{e}");
    }
}
