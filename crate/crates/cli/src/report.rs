//! Key/value reports and CSV plot data.

use std::fmt::Display;
use std::path::{Path, PathBuf};

const SECTIONS: [&str; 4] = ["inputs", "results", "fit", "verdict"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: [Vec<(String, String)>; 4],
}

/// Shortest-exact rendering used for every float in reports and CSV files.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, section: usize, key: &str, value: impl Display) {
        self.entries[section].push((key.to_string(), value.to_string()));
    }

    pub fn input(&mut self, key: &str, value: impl Display) {
        self.push(0, key, value);
    }

    pub fn result(&mut self, key: &str, value: impl Display) {
        self.push(1, key, value);
    }

    pub fn result_num(&mut self, key: &str, value: f64) {
        self.push(1, key, num(value));
    }

    pub fn fit(&mut self, key: &str, value: impl Display) {
        self.push(2, key, value);
    }

    pub fn fit_num(&mut self, key: &str, value: f64) {
        self.push(2, key, num(value));
    }

    pub fn verdict(&mut self, key: &str, value: impl Display) {
        self.push(3, key, value);
    }

    /// First value stored under `key` in `section`.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let i = SECTIONS.iter().position(|s| *s == section)?;
        self.entries[i].iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, entries) in SECTIONS.iter().zip(&self.entries) {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&format!("[{name}]\n"));
            for (k, v) in entries {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(columns: &[&str]) -> Self {
        Self { header: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// `out` with its extension replaced by `.csv` (or `.plot.csv` if it
/// already is a CSV file).
pub fn csv_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "csv") {
        out.with_extension("plot.csv")
    } else {
        out.with_extension("csv")
    }
}
