//! Row-oriented results and their CSV/JSON rendering.

use std::io::Write;

use serde_json::Value;

use crate::error::Result;
use crate::spec::RunSpec;

/// Significant digits for every number written out.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] and prints the shortest form of the
/// rounded value, switching to exponent notation outside `[1e-4, 1e12)`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_significant(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-4..1e12).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_significant(x: f64) -> f64 {
    format!("{x:.*e}", SIGNIFICANT_DIGITS - 1).parse().unwrap_or(x)
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => Value::from(round_significant(*x)),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::from(*b),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

fn io_err(source: std::io::Error) -> crate::error::CliError {
    crate::error::CliError::Io {
        path: "<buffer>".into(),
        source,
    }
}

/// CSV with `#` comment lines carrying the run metadata, then one header row.
pub fn render_csv(spec: &RunSpec, table: &Table) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for (key, value) in spec.metadata() {
        writeln!(out, "# {key}: {value}").map_err(io_err)?;
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| io_err(e.into());
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::text)).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| io_err(e.into_error()))
}

pub fn render_json(spec: &RunSpec, table: &Table) -> Result<Vec<u8>> {
    let mut doc = serde_json::Map::new();
    for (key, value) in spec.metadata() {
        doc.insert(key.into(), value);
    }
    doc.insert("columns".into(), Value::from(table.columns.clone()));
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
        .collect();
    doc.insert("rows".into(), Value::Array(rows));
    let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).map_err(|e| io_err(e.into()))?;
    out.push(b'\n');
    Ok(out)
}
