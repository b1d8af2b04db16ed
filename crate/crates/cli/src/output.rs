//! CSV with a `#`-prefixed metadata header, and JSON sidecars.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{io, numerical, CliError};

/// Bumped whenever a column is added, removed or reinterpreted.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

pub struct CsvTable {
    kind: &'static str,
    meta: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(kind: &'static str, columns: &[&'static str]) -> Self {
        Self { kind, meta: Vec::new(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Renders the table, refusing to emit NaN or infinities.
    pub fn render(&self) -> Result<String, CliError> {
        let mut out = format!("# covstat {} csv schema v{CSV_SCHEMA_VERSION}\n", self.kind);
        out.push_str(&format!("# version: {}\n", version_string()));
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| numerical(format!("csv: {e}")))?;
        for (r, row) in self.rows.iter().enumerate() {
            let mut fields = Vec::with_capacity(row.len());
            for (c, cell) in row.iter().enumerate() {
                fields.push(match cell {
                    Cell::Num(v) if !v.is_finite() => {
                        return Err(numerical(format!("row {r}, column {}: non-finite value {v}", self.columns[c])));
                    }
                    Cell::Num(v) => format!("{v:e}"),
                    Cell::Int(v) => v.to_string(),
                    Cell::Text(s) => s.clone(),
                });
            }
            w.write_record(&fields).map_err(|e| numerical(format!("csv: {e}")))?;
        }
        let body = w.into_inner().map_err(|e| numerical(format!("csv: {e}")))?;
        out.push_str(&String::from_utf8(body).expect("csv output is built from UTF-8 strings"));
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = self.render()?;
        write_text(path, &text)
    }
}

pub fn version_string() -> String {
    format!("covstat {}", env!("CARGO_PKG_VERSION"))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| numerical(format!("json: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// serde_json silently writes NaN as `null`, so numbers are vetted before they
/// reach a JSON document.
pub fn finite(what: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(numerical(format!("{what} is not finite ({v})")))
    }
}

/// `out.csv` gets `out.json` alongside it.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_rows() {
        let mut t = CsvTable::new("test", &["a", "b"]);
        t.meta("order", 15);
        t.push(vec![1.5.into(), "x".into()]);
        let text = t.render().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# covstat test csv schema v1");
        assert!(lines[1].starts_with("# version: covstat "));
        assert_eq!(lines[2], "# order: 15");
        assert_eq!(lines[3], "a,b");
        assert_eq!(lines[4], "1.5e0,x");
    }

    #[test]
    fn non_finite_is_refused() {
        let mut t = CsvTable::new("test", &["a"]);
        t.push(vec![f64::NAN.into()]);
        assert!(matches!(t.render(), Err(CliError::Numerical(_))));
    }

    #[test]
    fn floats_round_trip() {
        let mut t = CsvTable::new("test", &["a"]);
        let v = 0.1 + 0.2;
        t.push(vec![v.into()]);
        let text = t.render().unwrap();
        let last = text.lines().last().unwrap();
        assert_eq!(last.parse::<f64>().unwrap(), v);
    }
}
