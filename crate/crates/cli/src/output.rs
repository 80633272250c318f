//! CSV and JSON-lines table emission.

use std::fmt::Write as _;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Float(v) => format_float(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_value(cell: &Cell) -> String {
    match cell {
        Cell::Float(v) if v.is_finite() => format_float(*v),
        Cell::Float(_) => "null".to_string(),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => serde_json::to_string(s).expect("strings serialize"),
    }
}

/// Writes rows with a fixed column list. CSV gets a single header line.
pub struct TableWriter<W: Write> {
    out: W,
    format: Format,
    columns: Vec<String>,
    keys: Vec<String>,
}

impl<W: Write> TableWriter<W> {
    pub fn new(mut out: W, format: Format, columns: Vec<String>) -> io::Result<Self> {
        if format == Format::Csv {
            writeln!(out, "{}", columns.join(","))?;
        }
        let keys = columns.iter().map(|c| serde_json::to_string(c).expect("strings serialize")).collect();
        Ok(Self { out, format, columns, keys })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        assert_eq!(cells.len(), self.columns.len(), "row width differs from the header");
        let mut line = String::new();
        match self.format {
            Format::Csv => {
                let fields: Vec<String> = cells.iter().map(csv_field).collect();
                line.push_str(&fields.join(","));
            }
            Format::Jsonl => {
                line.push('{');
                for (i, (k, c)) in self.keys.iter().zip(cells).enumerate() {
                    if i > 0 {
                        line.push(',');
                    }
                    let _ = write!(line, "{k}:{}", json_value(c));
                }
                line.push('}');
            }
        }
        writeln!(self.out, "{line}")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
