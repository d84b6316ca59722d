//! Self-describing CSV tables, digests and the run manifest.
//!
//! Every output is rendered in memory first; files are written only after the
//! whole computation has succeeded, each through a temporary name and a rename.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of a config in its canonical JSON form.
pub fn config_digest<T: Serialize>(config: &T) -> String {
    let canonical = serde_json::to_vec(config).expect("configs serialize");
    sha256_hex(&canonical)
}

/// Shortest round-trip representation, always in exponent form.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

pub struct Table {
    title: String,
    digest: String,
    names: Vec<String>,
    units: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, digest: &str, columns: &[Column]) -> Self {
        Table {
            title: title.into(),
            digest: digest.to_string(),
            names: columns.iter().map(|c| c.name.to_string()).collect(),
            units: columns.iter().map(|c| c.unit.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Adds a column after construction, for per-mode energies.
    pub fn push_column(&mut self, name: String, unit: &str) {
        self.names.push(name);
        self.units.push(unit.to_string());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.names.len(), "row width");
        self.rows.push(cells);
    }

    pub fn render(&self) -> Vec<u8> {
        let mut out = String::new();
        out.push_str(&format!("# waveheat {} {}\n", env!("CARGO_PKG_VERSION"), self.title));
        out.push_str(&format!("# config_digest: sha256:{}\n", self.digest));
        out.push_str(&format!("# columns: {}\n", self.names.join(", ")));
        out.push_str(&format!("# units: {}\n", self.units.join(", ")));
        out.push_str(&self.names.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out.into_bytes()
    }
}

pub fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("outputs serialize");
    s.push(b'\n');
    s
}

/// Stage timer for the manifest.
pub struct Timings {
    start: Instant,
    last: Instant,
    stages: Vec<(String, f64)>,
}

impl Timings {
    pub fn start() -> Self {
        let now = Instant::now();
        Timings {
            start: now,
            last: now,
            stages: Vec::new(),
        }
    }

    pub fn stage(&mut self, name: &str) {
        let now = Instant::now();
        self.stages.push((name.to_string(), (now - self.last).as_secs_f64()));
        self.last = now;
    }
}

/// Everything a subcommand produces.
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    /// Deterministic run facts echoed into the manifest.
    pub notes: Value,
    pub warnings: Vec<String>,
}

impl RunOutput {
    pub fn new() -> Self {
        RunOutput {
            files: Vec::new(),
            notes: json!({}),
            warnings: Vec::new(),
        }
    }

    pub fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        self.notes[key] = serde_json::to_value(value).expect("notes serialize");
    }

    pub fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }
}

pub const MANIFEST: &str = "manifest.json";

fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let tmp = dir.join(format!(".{name}.partial"));
    let fail = |e: std::io::Error| CliError::Output(format!("cannot write {}: {e}", path.display()));
    fs::write(&tmp, bytes).map_err(fail)?;
    fs::rename(&tmp, &path).map_err(fail)?;
    Ok(path)
}

/// Writes the outputs and a manifest naming each with its digest.
pub fn finish<C: Serialize>(
    dir: &Path,
    subcommand: &str,
    config: &C,
    mut timings: Timings,
    run: RunOutput,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    let mut listed = Vec::new();
    for (name, bytes) in &run.files {
        written.push(write_atomic(dir, name, bytes)?);
        listed.push(json!({
            "path": name,
            "bytes": bytes.len(),
            "sha256": sha256_hex(bytes),
        }));
    }
    timings.stage("write");
    let manifest = json!({
        "toolkit": "waveheat",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "config": config,
        "config_digest": config_digest(config),
        "outputs": listed,
        "notes": run.notes,
        "warnings": run.warnings,
        "timings": {
            "wall_clock_seconds": timings.start.elapsed().as_secs_f64(),
            "stages": timings.stages.iter().map(|(n, t)| json!({"stage": n, "seconds": t})).collect::<Vec<_>>(),
        },
    });
    written.push(write_atomic(dir, MANIFEST, &json_bytes(&manifest))?);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_header_block() {
        let mut t = Table::new("demo", "abc", &[col("t", "time"), col("E", "energy")]);
        t.row(vec![num(0.0), num(1.5)]);
        let text = String::from_utf8(t.render()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# waveheat "));
        assert_eq!(lines[1], "# config_digest: sha256:abc");
        assert_eq!(lines[2], "# columns: t, E");
        assert_eq!(lines[3], "# units: time, energy");
        assert_eq!(lines[4], "t,E");
        assert_eq!(lines[5], "0e0,1.5e0");
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
