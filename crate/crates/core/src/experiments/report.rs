use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{FppError, Result};
use crate::stats::{MeanCi, Proportion};

/// One statistic at one scale, always with its replicate count and interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleStat {
    pub n: i32,
    pub label: String,
    pub count: usize,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Interval level, e.g. 0.95.
    pub ci_level: f64,
}

impl ScaleStat {
    pub fn from_mean(n: i32, label: &str, m: &MeanCi, level: f64) -> Self {
        ScaleStat {
            n,
            label: label.to_string(),
            count: m.count,
            estimate: m.mean,
            ci_low: m.lower(),
            ci_high: m.upper(),
            ci_level: level,
        }
    }

    pub fn from_proportion(n: i32, label: &str, p: &Proportion, level: f64) -> Self {
        ScaleStat {
            n,
            label: label.to_string(),
            count: p.trials,
            estimate: p.estimate,
            ci_low: p.lower,
            ci_high: p.upper,
            ci_level: level,
        }
    }
}

/// A pass/fail flag. Asserted flags are exact invariants and decide the exit
/// status; the others are statistical statements that are only reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub asserted: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub crate_version: String,
    pub git_hash: String,
    pub timestamp_unix: u64,
}

impl Provenance {
    pub fn capture() -> Self {
        let git_hash = std::process::Command::new("git")
            .args(["rev-parse", "HEAD"])
            .output()
            .ok()
            .filter(|o| o.status.success())
            .and_then(|o| String::from_utf8(o.stdout).ok())
            .map(|s| s.trim().to_string())
            .unwrap_or_else(|| "unknown".to_string());
        Provenance {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            git_hash,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub stats: Vec<ScaleStat>,
    pub verdicts: BTreeMap<String, Verdict>,
    /// Experiment-specific structured results.
    pub details: serde_json::Value,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        ExperimentReport {
            experiment: experiment.to_string(),
            config: config.clone(),
            stats: Vec::new(),
            verdicts: BTreeMap::new(),
            details: serde_json::Value::Null,
            provenance: Provenance::capture(),
        }
    }

    pub fn assert_flag(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.flag(name, passed, true, detail.into());
    }

    pub fn report_flag(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.flag(name, passed, false, detail.into());
    }

    fn flag(&mut self, name: &str, passed: bool, asserted: bool, detail: String) {
        self.verdicts.insert(
            name.to_string(),
            Verdict {
                passed,
                asserted,
                detail,
            },
        );
    }

    /// Names of asserted flags that failed.
    pub fn violations(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|(_, v)| v.asserted && !v.passed)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn stat(&self, n: i32, label: &str) -> Option<&ScaleStat> {
        self.stats.iter().find(|s| s.n == n && s.label == label)
    }
}

/// Per-replicate rows destined for `samples.csv`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SampleTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl SampleTable {
    pub fn new(header: &[&str]) -> Self {
        SampleTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j].as_str()).collect())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| FppError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| FppError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| FppError::Internal(e.to_string()))
    }
}

/// Row builder: every value goes through `Display`, which for `f64` is the
/// shortest round-trip representation and hence deterministic.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($v.to_string()),*] };
}

pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub samples: SampleTable,
    pub plot: Option<String>,
}

impl ExperimentOutput {
    /// Write `report.json`, `samples.csv` and, if present, `plot.svg`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let json = serde_json::to_string_pretty(&self.report).map_err(|e| FppError::Internal(e.to_string()))?;
        fs::write(dir.join("report.json"), json + "\n")?;
        fs::write(dir.join("samples.csv"), self.samples.to_csv()?)?;
        if let Some(svg) = &self.plot {
            fs::write(dir.join("plot.svg"), svg)?;
        }
        Ok(())
    }
}
