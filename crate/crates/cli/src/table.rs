//! CSV output: `#` metadata lines, one header row, comma-separated data rows.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvTable {
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(metadata: Vec<String>, header: &[&str]) -> Self {
        Self {
            metadata,
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for m in &self.metadata {
            let _ = writeln!(out, "# {m}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Values of the named column, parsed as numbers.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }
}

/// Fixed-decimal rendering so output does not depend on float-printing heuristics.
pub fn fixed(v: f64) -> String {
    format!("{v:.10}")
}
