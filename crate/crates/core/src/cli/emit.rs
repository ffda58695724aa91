//! Deterministic output: CSV tables and a JSONL check summary, each headed by
//! the config hash, plus a manifest listing every file with its digest.

use crate::error::{Result, TfdError};
use crate::report::{CheckResult, CheckStatus};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// A named table of floating point columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<String>) -> Self {
        Table {
            name: name.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(TfdError::Shape(format!(
                "table {} row has {} values for {} columns",
                self.name,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }
}

/// Header shared by every emitted file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub kind: String,
    pub seed: u64,
}

/// 17 significant digits; non-finite values spelled out.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn json_float(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        format!("\"{}\"", format_float(x))
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

pub fn render_csv(table: &Table, prov: &Provenance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# config_hash: {}", prov.config_hash);
    let _ = writeln!(out, "# kind: {}", prov.kind);
    let _ = writeln!(out, "# seed: {}", prov.seed);
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// First line is the header record, then one record per check.
pub fn render_summary(checks: &[CheckResult], prov: &Provenance) -> String {
    let mut out = format!(
        "{{\"record\":\"header\",\"config_hash\":{},\"kind\":{},\"seed\":{}}}\n",
        json_string(&prov.config_hash),
        json_string(&prov.kind),
        prov.seed
    );
    for c in checks {
        let status = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
        };
        let _ = writeln!(
            out,
            "{{\"record\":\"check\",\"name\":{},\"residual\":{},\"threshold\":{},\"status\":\"{status}\"}}",
            json_string(&c.name),
            json_float(c.residual),
            json_float(c.threshold)
        );
    }
    out
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes the tables, `summary.jsonl` and `manifest.json` into `dir` and
/// returns the written paths in order.
pub fn write_outputs(
    dir: &Path,
    prov: &Provenance,
    config_json: &serde_json::Value,
    tables: &[Table],
    checks: &[CheckResult],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut files: Vec<(String, String)> = tables.iter().map(|t| (format!("{}.csv", t.name), render_csv(t, prov))).collect();
    files.push(("summary.jsonl".into(), render_summary(checks, prov)));
    let mut listing = Vec::new();
    let mut paths = Vec::new();
    for (name, body) in &files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
        listing.push(serde_json::json!({ "file": name, "sha256": digest(body.as_bytes()) }));
        paths.push(path);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let manifest = serde_json::json!({
        "config_hash": prov.config_hash,
        "kind": prov.kind,
        "seed": prov.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config_json,
        "checks": checks.len(),
        "failed": failed,
        "files": listing,
    });
    let path = dir.join("manifest.json");
    let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    body.push('\n');
    fs::write(&path, body).map_err(|e| io_error(&path, e))?;
    paths.push(path);
    Ok(paths)
}

fn io_error(path: &Path, e: std::io::Error) -> TfdError {
    TfdError::Io(format!("{}: {e}", path.display()))
}
