//! Run reports and their CSV / JSON emission.

use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured - target| <= tolerance`.
    Within,
    /// `measured <= target + tolerance`.
    AtMost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    /// Label of the equation or statement the quantity is checked against.
    pub target_tag: String,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Criterion {
    pub fn new(name: &str, tag: &str, measured: f64, target: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::Within => (measured - target).abs() <= tolerance,
            Comparison::AtMost => measured <= target + tolerance,
        };
        Criterion { name: name.into(), target_tag: tag.into(), measured, target, tolerance, comparison, pass }
    }

    /// A criterion decided outside the numeric comparison, e.g. an exact
    /// rational identity; `measured` and `target` are kept for display.
    pub fn exact(name: &str, tag: &str, measured: f64, target: f64, pass: bool) -> Self {
        Criterion {
            name: name.into(),
            target_tag: tag.into(),
            measured,
            target,
            tolerance: 0.0,
            comparison: Comparison::Within,
            pass,
        }
    }
}

/// Rows of one CSV file with a fixed header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal form; identical across runs and platforms.
pub fn num(v: f64) -> String {
    format!("{v}")
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub experiment: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub criteria: Vec<Criterion>,
    /// Experiment-specific tables, e.g. the exact sharpness rows.
    pub details: serde_json::Value,
    pub pass: bool,
    /// Kept out of the JSON so that reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunReport {
    pub fn new(experiment: &str, seed: u64, parameters: serde_json::Value, criteria: Vec<Criterion>, details: serde_json::Value) -> Self {
        let pass = criteria.iter().all(|c| c.pass);
        RunReport { experiment: experiment.into(), seed, parameters, criteria, details, pass, wall_time: Duration::ZERO }
    }

    /// One line per criterion.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.criteria {
            s.push_str(&format!(
                "{} {:<40} measured {:<24} target {} ({:?} {}) [{}]\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.target,
                c.comparison,
                c.tolerance,
                c.target_tag
            ));
        }
        s.push_str(&format!("{}: {} in {:.1}s\n", self.experiment, if self.pass { "pass" } else { "fail" }, self.wall_time.as_secs_f64()));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Writes `<dir>/<experiment>.csv` or `.json`; returns the path.
pub fn emit(report: &RunReport, table: &Table, dir: &Path, format: Format) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    match format {
        Format::Csv => {
            let path = dir.join(format!("{}.csv", report.experiment));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&table.header)?;
            for r in &table.rows {
                w.write_record(r)?;
            }
            w.flush()?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join(format!("{}.json", report.experiment));
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            std::fs::write(&path, text)?;
            Ok(path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert!(Criterion::new("a", "t", 2.1, 2.0, 0.25, Comparison::Within).pass);
        assert!(!Criterion::new("a", "t", 1.7, 2.0, 0.25, Comparison::Within).pass);
        assert!(Criterion::new("a", "t", 0.3, 0.375, 0.15, Comparison::AtMost).pass);
        assert!(!Criterion::new("a", "t", 0.6, 0.375, 0.15, Comparison::AtMost).pass);
    }

    #[test]
    fn json_keeps_field_order_and_drops_wall_time() {
        let mut r = RunReport::new("x", 3, serde_json::json!({"b": 1, "a": 2}), vec![], serde_json::Value::Null);
        r.wall_time = Duration::from_secs(5);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"experiment":"x","seed":3,"parameters":{"a":2,"b":1},"criteria":[],"details":null,"pass":true}"#);
    }
}
