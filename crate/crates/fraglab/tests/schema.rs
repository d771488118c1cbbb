mod common;

use std::path::Path;

use common::*;
use jsonschema::JSONSchema;
use serde_json::Value;

fn schema() -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas/report.schema.json");
    let value: Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(schema: &JSONSchema, report: &Value, what: &str) {
    if let Err(errors) = schema.validate(report) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{what}: {}", msgs.join("; "));
    }
}

#[test]
fn every_subcommand_report_validates() {
    let schema = schema();
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_CONFIG);
    let out = dir.path().join("out");
    let o = fraglab(&[
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
        "all",
    ]);
    assert!(matches!(o.status.code(), Some(0 | 1)), "{}", stderr(&o));
    let top = read_report(&out);
    assert_valid(&schema, &top, "all");
    for section in top["sections"].as_array().unwrap() {
        let name = section["subcommand"].as_str().unwrap();
        let report = read_report(&out.join(name));
        assert_valid(&schema, &report, name);
        assert_eq!(report["subcommand"], name);
        assert_eq!(report["checks"], section["checks"]);
    }
}

#[test]
fn single_runs_validate() {
    let schema = schema();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = fraglab(&[
        "alpha",
        "--boundary",
        "poisson",
        "--n",
        "30",
        "--seed",
        "2",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_valid(&schema, &read_report(dir.path()), "alpha");
}

#[test]
fn schema_rejects_malformed_reports() {
    let schema = schema();
    let dir = tempfile::tempdir().unwrap();
    let o = fraglab(&["genfun", "--n", "200", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let good = read_report(dir.path());
    assert_valid(&schema, &good, "genfun");

    let mut missing = good.clone();
    missing["checks"][0].as_object_mut().unwrap().remove("threshold");
    assert!(!schema.is_valid(&missing));
    let mut wrong = good.clone();
    wrong["subcommand"] = Value::from("bogus");
    assert!(!schema.is_valid(&wrong));
    let mut extra = good;
    extra["unexpected"] = Value::from(1);
    assert!(!schema.is_valid(&extra));
}
