//! Data files and run reports.
//!
//! CSV: `#`-prefixed metadata lines, one header row, then data rows. Floats
//! are written with 17 significant digits (`{:.16e}`), which round-trips.
//! JSON: `{schema_version, meta, columns, rows}`; non-finite floats become
//! `null`. Data sections never contain timing or worker information, so a
//! rerun with the same config reproduces them byte for byte.

use crate::config::{ExperimentConfig, Format};
use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv(&self, out: &mut String) {
        match self {
            Cell::Int(v) => write!(out, "{v}"),
            Cell::Float(v) if v.is_finite() => write!(out, "{v:.16e}"),
            Cell::Float(v) => write!(out, "{v}"),
            Cell::Bool(v) => write!(out, "{v}"),
            Cell::Text(v) => write!(out, "{v}"),
        }
        .expect("writing to a String cannot fail");
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) => Value::Null,
            Cell::Bool(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }
}

/// A named table written as `<name>.csv` or `<name>.json`.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(name: &str, columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, config: &ExperimentConfig) -> Result<String> {
        let config_json = serde_json::to_value(config)?;
        match format {
            Format::Csv => {
                let mut out = String::new();
                writeln!(out, "# densmat {VERSION}")?;
                writeln!(out, "# command: {}", config.command)?;
                writeln!(out, "# schema_version: {SCHEMA_VERSION}")?;
                writeln!(out, "# config: {}", serde_json::to_string(&config_json)?)?;
                writeln!(out, "# master_seed: {}", config.master_seed)?;
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    for (i, cell) in row.iter().enumerate() {
                        if i > 0 {
                            out.push(',');
                        }
                        cell.csv(&mut out);
                    }
                    out.push('\n');
                }
                Ok(out)
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let doc = json!({
                    "schema_version": SCHEMA_VERSION,
                    "meta": {
                        "version": VERSION,
                        "command": config.command,
                        "config": config_json,
                        "master_seed": config.master_seed,
                    },
                    "columns": self.columns,
                    "rows": rows,
                });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
        }
    }
}

/// Outcome of one configured threshold.
#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub comparison: &'static str,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value < threshold`; NaN fails.
    pub fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: "<",
            threshold,
            passed: value < threshold,
        }
    }

    /// Passes when `value > threshold`; NaN fails.
    pub fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            comparison: ">",
            threshold,
            passed: value > threshold,
        }
    }
}

/// Collects files, checks and notices of one command run.
#[derive(Debug)]
pub struct Run {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub notices: Vec<String>,
}

impl Run {
    pub fn new(config: ExperimentConfig, out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        Ok(Self {
            config,
            out_dir: out_dir.to_path_buf(),
            files: Vec::new(),
            checks: Vec::new(),
            notices: Vec::new(),
        })
    }

    pub fn write(&mut self, table: &Table) -> Result<()> {
        let ext = match self.config.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = self.out_dir.join(format!("{}.{ext}", table.name));
        let text = table.render(self.config.format, &self.config)?;
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(path);
        Ok(())
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn notice(&mut self, message: impl Into<String>) {
        let message = message.into();
        eprintln!("notice: {message}");
        self.notices.push(message);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Writes `<command>_report.json`, the only file that records wall-clock
    /// time.
    pub fn finish(self, wall_clock_seconds: f64) -> Result<bool> {
        let passed = self.passed();
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "version": VERSION,
            "command": self.config.command,
            "config": self.config,
            "master_seed": self.config.master_seed,
            "checks": self.checks,
            "notices": self.notices,
            "files": self.files,
            "wall_clock_seconds": wall_clock_seconds,
            "passed": passed,
        });
        let path = self
            .out_dir
            .join(format!("{}_report.json", self.config.command));
        fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("cannot write {}", path.display()))?;
        for c in &self.checks {
            eprintln!(
                "[{}] {}: {} {} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.comparison,
                c.threshold
            );
        }
        Ok(passed)
    }
}
