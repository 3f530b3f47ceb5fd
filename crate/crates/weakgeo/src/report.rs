//! Run reports and data files. Every comparison in a report carries its
//! tolerance and the name of the library operation it checks, and CSV floats
//! are serialized with 17 significant digits so byte-identical output doubles
//! as a determinism check.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// One tolerance-checked comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// Human-readable description of what is compared.
    pub name: String,
    /// Name of the library operation whose contract this verifies.
    pub formula: String,
    /// Value produced by simulation.
    pub computed: f64,
    /// Oracle / closed-form value, when the check is a two-sided comparison.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_err: Option<f64>,
    /// Effective tolerance (after any --tolerance-scale).
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Two-sided comparison on absolute error.
    pub fn absolute(
        name: impl Into<String>,
        formula: impl Into<String>,
        computed: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        let abs_err = (computed - expected).abs();
        Self {
            name: name.into(),
            formula: formula.into(),
            computed,
            expected: Some(expected),
            abs_err: Some(abs_err),
            rel_err: None,
            tolerance,
            pass: abs_err < tolerance,
            note: None,
        }
    }

    /// Two-sided comparison on relative error.
    pub fn relative(
        name: impl Into<String>,
        formula: impl Into<String>,
        computed: f64,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        let abs_err = (computed - expected).abs();
        let rel_err = abs_err / expected.abs();
        Self {
            name: name.into(),
            formula: formula.into(),
            computed,
            expected: Some(expected),
            abs_err: Some(abs_err),
            rel_err: Some(rel_err),
            tolerance,
            pass: rel_err < tolerance,
            note: None,
        }
    }

    /// Bound on an aggregated error (battery maxima and the like).
    pub fn bound(
        name: impl Into<String>,
        formula: impl Into<String>,
        value: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            formula: formula.into(),
            computed: value,
            expected: None,
            abs_err: None,
            rel_err: None,
            tolerance,
            pass: value < tolerance,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A named scalar echoed in the report.
#[derive(Debug, Clone, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, value: f64, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            unit: unit.into(),
        }
    }
}

/// Full report of a `run` or `battery` invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    /// "run" or "battery".
    pub command: String,
    /// Scenario kind or suite name.
    pub kind: String,
    /// Echo of the input configuration (runs only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<serde_json::Value>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub tolerance_scale: f64,
    pub values: Vec<NamedValue>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn recompute_pass(&mut self) {
        self.pass = self.checks.iter().all(|c| c.pass);
    }
}

/// Tabular output destined for `data.csv`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// 17 significant digits: enough to reproduce any f64 exactly, which makes
/// byte-comparison of CSV files a valid determinism check.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, table: &Table) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = fs::File::create(path)?;
    writeln!(out, "{}", table.header.join(","))?;
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_report(path: &Path, report: &RunReport) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(path, json)
}

/// Resolve the output directory: explicit flag, then `WEAKGEO_OUT`, then
/// `./weakgeo-out`.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("WEAKGEO_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("weakgeo-out"))
}
