//! Tables and their CSV/JSON rendering.
//!
//! CSV dialect: comma separator, `.` decimal point, one header row, LF line
//! endings. Text cells containing a comma or a double quote are quoted with
//! doubled inner quotes; nothing else is quoted. Numbers are written in
//! scientific notation with a fixed number of significant digits, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::{CliError, Result};

pub const DEFAULT_PRECISION: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
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

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

/// `x` with `sig` significant digits in scientific notation.
pub fn format_number(x: f64, sig: usize) -> String {
    if x == 0.0 {
        // avoid "-0" noise
        return format!("{:.*e}", sig.saturating_sub(1), 0.0);
    }
    format!("{:.*e}", sig.saturating_sub(1), x)
}

impl Cell {
    fn render(&self, sig: usize) -> String {
        match self {
            Cell::Num(x) => format_number(*x, sig),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self, sig: usize) -> Value {
        match self {
            // round-trip through the fixed-precision text for determinism
            Cell::Num(x) => format_number(*x, sig).parse::<f64>().map(|v| json!(v)).unwrap_or(Value::Null),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// Free-text label, e.g. the figure caption the data reproduces.
    pub label: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra key/value metadata carried into JSON and the sidecar file.
    pub meta: Vec<(String, String)>,
}

impl Table {
    pub fn new(label: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            label: label.into(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match r[k] {
                Cell::Num(x) => Some(x),
                Cell::Int(i) => Some(i as f64),
                _ => None,
            })
            .collect()
    }

    pub fn to_csv(&self, sig: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.render(sig)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, sig: usize) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.clone(), v.json(sig));
                }
                Value::Object(m)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("label".into(), json!(self.label));
        doc.insert("meta".into(), self.meta_json());
        doc.insert("columns".into(), json!(self.columns));
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
        s.push('\n');
        s
    }

    fn meta_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.meta {
            m.insert(k.clone(), json!(v));
        }
        Value::Object(m)
    }

    pub fn render(&self, format: Format, sig: usize) -> String {
        match format {
            Format::Csv => self.to_csv(sig),
            Format::Json => self.to_json(sig),
        }
    }

    /// Label and metadata, written next to a CSV file.
    pub fn sidecar(&self) -> String {
        let mut doc = Map::new();
        doc.insert("label".into(), json!(self.label));
        doc.insert("meta".into(), self.meta_json());
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
        s.push('\n');
        s
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `<path>.<suffix>` next to the main output.
pub fn sibling(path: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    s.into()
}

/// Writes `table` to `path` (plus a `.meta.json` sidecar for CSV), or to stdout.
pub fn emit(table: &Table, format: Format, sig: usize, path: Option<&Path>) -> Result<()> {
    let text = table.render(format, sig);
    match path {
        Some(p) => {
            write_file(p, &text)?;
            if format == Format::Csv {
                write_file(&sibling(p, "meta.json"), &table.sidecar())?;
            }
            Ok(())
        }
        None => {
            if format == Format::Csv && !table.label.is_empty() {
                eprintln!("# {}", table.label);
            }
            let mut out = String::new();
            let _ = write!(out, "{text}");
            print!("{out}");
            Ok(())
        }
    }
}

/// Writes an extra table next to the main output (e.g. a zero contour).
pub fn emit_extra(table: &Table, format: Format, sig: usize, main: Option<&Path>, suffix: &str) -> Result<()> {
    match main {
        Some(p) => write_file(&sibling(p, suffix), &table.render(format, sig)),
        None => {
            eprintln!("# {suffix}");
            eprint!("{}", table.render(format, sig));
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_is_fixed() {
        assert_eq!(format_number(1.0, 12), "1.00000000000e0");
        assert_eq!(format_number(-0.0, 3), "0.00e0");
        assert_eq!(format_number(-1234.5678, 4), "-1.235e3");
    }

    #[test]
    fn csv_dialect() {
        let mut t = Table::new("x", &["a", "b", "c"]);
        t.push(vec![1.5.into(), "free".into(), true.into()]);
        assert_eq!(t.to_csv(3), "a,b,c\n1.50e0,free,true\n");
        assert_eq!(t.column("a"), Some(vec![1.5]));
        assert_eq!(t.column("b"), None);
        t.push(vec![2.0.into(), "a, \"b\"".into(), false.into()]);
        assert!(t.to_csv(3).ends_with("2.00e0,\"a, \"\"b\"\"\",false\n"));
    }

    #[test]
    fn json_rounds_numbers() {
        let mut t = Table::new("x", &["a"]);
        t.push(vec![(1.0 / 3.0).into()]);
        let v: Value = serde_json::from_str(&t.to_json(3)).unwrap();
        assert_eq!(v["rows"][0]["a"], json!(0.333));
    }
}
