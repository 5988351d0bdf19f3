//! Scenario results: checks with targets and tolerances, reported-only
//! quantities, warnings and tables, plus their JSON/CSV/text renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::Config;

pub const SCHEMA: &str = "relclock-results";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// How value is compared: "abs", "rel", ">=", "<=", "range".
    pub rule: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// |value - target| <= tol
    pub fn abs(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: Some(target),
            rule: "abs",
            tolerance: Some(tol),
            upper: None,
            pass: (value - target).abs() <= tol,
        }
    }

    /// |value - target| <= tol·|target|
    pub fn rel(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: Some(target),
            rule: "rel",
            tolerance: Some(tol),
            upper: None,
            pass: (value - target).abs() <= tol * target.abs(),
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, min: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: Some(min),
            rule: ">=",
            tolerance: None,
            upper: None,
            pass: value >= min,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, max: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: Some(max),
            rule: "<=",
            tolerance: None,
            upper: None,
            pass: value <= max,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name: name.into(),
            value,
            target: Some(lo),
            rule: "range",
            tolerance: None,
            upper: Some(hi),
            pass: value >= lo && value <= hi,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_num(*x),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Shortest round-trip form; always contains '.' or an exponent, never a
/// locale separator.
pub fn format_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Large tables (exported histories, spectra) go to CSV only.
    #[serde(skip)]
    pub csv_only: bool,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            csv_only: false,
        }
    }

    pub fn csv_only(mut self) -> Self {
        self.csv_only = true;
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub quantities: Vec<Quantity>,
    pub warnings: Vec<String>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn quantity(&mut self, name: impl Into<String>, value: f64) {
        self.quantities.push(Quantity {
            name: name.into(),
            value,
        });
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Serialize)]
struct ResultsFile<'a> {
    schema: &'static str,
    schema_version: u32,
    tool_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    scenario: String,
    passed: bool,
    config: &'a Config,
    checks: &'a [Check],
    quantities: &'a [Quantity],
    warnings: &'a [String],
    files: Vec<String>,
    tables: Vec<&'a Table>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WriteOptions {
    pub timestamp: bool,
}

pub const RESULTS_FILE: &str = "results.json";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Writes results.json, summary.txt and every table as CSV into `dir`.
/// Returns the written paths.
pub fn write_all(dir: &Path, config: &Config, report: &Report, opts: WriteOptions) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let timestamp = opts.timestamp.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    let mut written = Vec::new();
    for t in &report.tables {
        let p = dir.join(t.file_name());
        t.write_csv(&p)?;
        written.push(p);
    }
    let results = ResultsFile {
        schema: SCHEMA,
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION"),
        generated_at: timestamp.clone(),
        scenario: config.scenario.to_string(),
        passed: report.passed(),
        config,
        checks: &report.checks,
        quantities: &report.quantities,
        warnings: &report.warnings,
        files: report.tables.iter().map(Table::file_name).collect(),
        tables: report.tables.iter().filter(|t| !t.csv_only).collect(),
    };
    let mut json = serde_json::to_string_pretty(&results)?;
    json.push('\n');
    let p = dir.join(RESULTS_FILE);
    fs::write(&p, json).with_context(|| format!("cannot write {}", p.display()))?;
    written.push(p);

    let p = dir.join(SUMMARY_FILE);
    fs::write(&p, summary(config, report, timestamp.as_deref()))
        .with_context(|| format!("cannot write {}", p.display()))?;
    written.push(p);
    Ok(written)
}

pub fn summary(config: &Config, report: &Report, timestamp: Option<&str>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "relclock {}, scenario {}", env!("CARGO_PKG_VERSION"), config.scenario);
    if let Some(ts) = timestamp {
        let _ = writeln!(s, "generated {ts}");
    }
    let _ = writeln!(s);
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &report.checks {
        let expect = match (c.rule, c.target, c.tolerance, c.upper) {
            ("range", Some(lo), _, Some(hi)) => format!("in [{lo}, {hi}]"),
            ("abs", Some(t), Some(tol), _) => format!("{t:.6e} ± {tol:e}"),
            ("rel", Some(t), Some(tol), _) => format!("{t:.6e} ± {:.1}%", tol * 100.0),
            (rule, Some(t), _, _) => format!("{rule} {t:e}"),
            _ => String::new(),
        };
        let _ = writeln!(
            s,
            "[{}] {:width$}  {:>14.6e}  {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            expect,
        );
    }
    if !report.quantities.is_empty() {
        let _ = writeln!(s, "\nreported (not asserted):");
        for q in &report.quantities {
            let _ = writeln!(s, "  {} = {:.9e}", q.name, q.value);
        }
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(s, "\nwarnings:");
        for w in &report.warnings {
            let _ = writeln!(s, "  {w}");
        }
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(
        s,
        "\n{} of {} checks passed{}",
        report.checks.len() - failed,
        report.checks.len(),
        if failed == 0 { "" } else { " (FAILED)" }
    );
    s
}
