#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

/// Parameters small enough that `all` finishes in a few seconds.
pub const SMALL_CONFIG: &str = r#"
[alpha]
n = 60
replications = 500

[limit-test]
n = [200, 2000]

[tau-test]
n = 200
replications = 2000

[genfun]
n = 500
cross_n = 50

[gamma-setup]
n = 20
replications = 500
bridge_n = 100
bridge_replications = 1000
uniform_n = 500
uniform_runs = 5
trajectories = 2

[line-invariance]
steps = [1, 5]
replications = 1000
trajectories = 2

[vague-convergence]
n = 16
replications = 500

[x1-invariance]
steps = [1, 5]
replications = 2000
trajectories = 2

[drift]
states = 5
run_length = 50
replications = 200
"#;

pub fn fraglab(args: &[&str]) -> Output {
    fraglab_env(args, &[])
}

pub fn fraglab_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fraglab"));
    cmd.args(args).env_remove("FRAGLAB_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn fraglab")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("fraglab.toml");
    std::fs::write(&path, text).unwrap();
    path
}

pub fn read_report(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

/// Relative path and bytes of every file below `root`, sorted by path.
pub fn snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}
