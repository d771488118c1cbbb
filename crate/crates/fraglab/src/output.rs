//! Report envelope, CSV tables and atomic file output.

use std::io::Write;
use std::path::Path;

use fraglab_core::{Check, Report};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

pub const REPORT_FILE: &str = "report.json";

/// A named CSV file produced by a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Builds CSV bytes with a fixed header.
pub struct Table {
    name: String,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).map_err(encode)?;
        Ok(Table {
            name: name.to_string(),
            writer,
        })
    }

    pub fn row<R: Serialize>(&mut self, record: R) -> Result<(), CliError> {
        self.writer.serialize(record).map_err(encode)
    }

    pub fn finish(self) -> Result<OutputFile, CliError> {
        let bytes = self.writer.into_inner().map_err(|e| CliError::Encode(e.to_string()))?;
        Ok(OutputFile { name: self.name, bytes })
    }
}

fn encode(e: impl std::fmt::Display) -> CliError {
    CliError::Encode(e.to_string())
}

/// Where the parameters came from and what was finally used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// Parsed config file, if one was given.
    pub file: Value,
    /// Flags given on the command line.
    pub cli: Value,
    /// Resolved parameters after defaults.
    pub effective: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Section {
    pub subcommand: String,
    pub pass: bool,
    pub effective: Value,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub seed: Option<u64>,
    pub pass: bool,
    pub config: Provenance,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sections: Vec<Section>,
}

impl RunReport {
    pub fn new(subcommand: &str, seed: Option<u64>, config: Provenance, report: Report, outputs: Vec<String>) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            seed,
            pass: report.pass(),
            config,
            checks: report.checks,
            notes: report.notes,
            outputs,
            sections: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Result<Vec<u8>, CliError> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(encode)?;
        bytes.push(b'\n');
        Ok(bytes)
    }
}

/// JSON value with every `null` object member removed.
pub fn compact(value: Value) -> Value {
    match value {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| (k, compact(v)))
                .collect(),
        ),
        Value::Array(items) => Value::Array(items.into_iter().map(compact).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(value: &T) -> Result<Value, CliError> {
    serde_json::to_value(value).map(compact).map_err(encode)
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir.display(), e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(target.display(), e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(target.display(), e))?;
    tmp.persist(&target)
        .map_err(|e| CliError::io(target.display(), e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_table() {
        let mut t = Table::new("x.csv", &["n", "k", "a"]).unwrap();
        t.row((3usize, 1usize, 0.25f64)).unwrap();
        t.row((3usize, 2usize, -1.5e-20f64)).unwrap();
        let f = t.finish().unwrap();
        assert_eq!(String::from_utf8(f.bytes).unwrap(), "n,k,a\n3,1,0.25\n3,2,-1.5e-20\n");
    }

    #[test]
    fn compact_drops_nulls() {
        let v = serde_json::json!({"a": null, "b": {"c": null, "d": 1}, "e": [null, 2]});
        assert_eq!(compact(v), serde_json::json!({"b": {"d": 1}, "e": [null, 2]}));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "r.json", b"one").unwrap();
        write_atomic(dir.path(), "r.json", b"two").unwrap();
        assert_eq!(std::fs::read(dir.path().join("r.json")).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
