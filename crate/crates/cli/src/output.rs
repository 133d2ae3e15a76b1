//! Tabular results rendered as CSV with a units header, or as JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Self::Empty, Self::Num)
    }

    fn csv(&self) -> String {
        match self {
            Self::Num(v) => format!("{v:.11e}"),
            Self::Int(v) => v.to_string(),
            Self::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Self::Text(s) => s.clone(),
            Self::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Self::Num(v) => json!(v),
            Self::Int(v) => json!(v),
            Self::Text(s) => json!(s),
            Self::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

/// Named columns plus `key = value` notes that travel with the data.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: Cell) {
        self.notes.push((key.into(), value));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k} = {}", v.csv());
        }
        let units: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{} [{}]", c.name, c.unit))
            .collect();
        let _ = writeln!(out, "# {}", units.join(", "));
        let names: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        let _ = writeln!(out, "{}", names.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut notes = Map::new();
        for (k, v) in &self.notes {
            notes.insert(k.clone(), v.json());
        }
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| json!({ "name": c.name, "unit": c.unit }))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let doc = json!({ "notes": notes, "columns": columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    /// Gnuplot script plotting every numeric column against the first from `data`.
    pub fn gnuplot(&self, data: &Path, title: &str) -> String {
        let mut out = String::new();
        let first = &self.columns[0];
        let _ = writeln!(out, "set datafile separator ','");
        let _ = writeln!(out, "set datafile commentschars '#'");
        let _ = writeln!(out, "set key autotitle columnhead");
        let _ = writeln!(out, "set title '{title}'");
        let _ = writeln!(out, "set xlabel '{} [{}]'", first.name, first.unit);
        let numeric: Vec<usize> = (1..self.columns.len())
            .filter(|&j| self.rows.iter().any(|r| matches!(r[j], Cell::Num(_))))
            .collect();
        if let Some(&j) = numeric.first() {
            let _ = writeln!(out, "set ylabel '[{}]'", self.columns[j].unit);
        }
        let plots: Vec<String> = numeric
            .iter()
            .map(|&j| format!("'{}' using 1:{} with linespoints", data.display(), j + 1))
            .collect();
        let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
        out
    }
}
