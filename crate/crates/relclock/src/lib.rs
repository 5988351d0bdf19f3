//! Config-driven runner for the relational-time scenarios in
//! `relclock-core`: parses a TOML scenario file, runs it, and writes
//! `results.json`, `summary.txt` and CSV tables.

pub mod config;
pub mod report;
pub mod scenarios;
pub mod validate;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub use config::Config;
pub use report::Report;

/// Overrides the config's `output_dir` (the command-line flag wins over both).
pub const OUTPUT_DIR_ENV: &str = "RELCLOCK_OUTPUT_DIR";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub timestamp: bool,
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

pub fn resolve_output_dir(cfg: &Config, flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(cfg.scenario.to_string()))
}

pub fn run(cfg: &Config, opts: &RunOptions) -> Result<Outcome> {
    let dir = resolve_output_dir(cfg, opts.output_dir.as_deref());
    // fail before the computation if the directory cannot be created
    std::fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let report = scenarios::run_scenario(cfg).with_context(|| format!("scenario {} failed", cfg.scenario))?;
    let files = report::write_all(&dir, cfg, &report, report::WriteOptions { timestamp: opts.timestamp })?;
    Ok(Outcome {
        report,
        output_dir: dir,
        files,
    })
}
