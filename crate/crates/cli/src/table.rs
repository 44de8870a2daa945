//! Rectangular result tables rendered as CSV or JSON.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Text(s) => s.clone(),
            Self::Int(i) => i.to_string(),
            Self::Float(x) => render_float(*x),
            Self::Bool(b) => b.to_string(),
            Self::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Self::Text(s) => Value::from(s.as_str()),
            Self::Int(i) => Value::from(*i),
            Self::Float(x) => Value::from(*x),
            Self::Bool(b) => Value::from(*b),
            Self::Empty => Value::Null,
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Self::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Self::Int(i as i64)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Self::Int(i)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Bool(b)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Self::Empty, Into::into)
    }
}

/// Shortest text that parses back to `x`; exponent form for tiny or huge
/// magnitudes.
pub fn render_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Column values by header name.
    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.headers.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_bytes(&self, format: OutputFormat) -> Result<Vec<u8>> {
        match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::render))?;
                }
                w.into_inner()
                    .map_err(|e| CliError::Input(format!("csv buffer: {e}")))
            }
            OutputFormat::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let object: Map<String, Value> = self
                            .headers
                            .iter()
                            .zip(row)
                            .map(|(h, c)| (h.to_string(), c.to_json()))
                            .collect();
                        Value::Object(object)
                    })
                    .collect();
                let mut bytes = serde_json::to_vec_pretty(&records)?;
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }

    /// Writes `<dir>/<stem>.<ext>` and returns the path.
    pub fn write_to(&self, dir: &Path, stem: &str, format: OutputFormat) -> Result<PathBuf> {
        let path = dir.join(format!("{stem}.{}", format.extension()));
        write_file(&path, &self.to_bytes(format)?)?;
        Ok(path)
    }

    pub fn write_stdout(&self, format: OutputFormat) -> Result<()> {
        std::io::stdout()
            .write_all(&self.to_bytes(format)?)
            .map_err(|e| CliError::io("<stdout>", e))
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_rendering() {
        let mut t = Table::new(&["asset", "x", "n", "flag", "note"]);
        t.push(vec![
            "A".into(),
            0.1.into(),
            3usize.into(),
            true.into(),
            Cell::Empty,
        ]);
        let csv = String::from_utf8(t.to_bytes(OutputFormat::Csv).unwrap()).unwrap();
        assert_eq!(csv, "asset,x,n,flag,note\nA,0.1,3,true,\n");
        let json: Value = serde_json::from_slice(&t.to_bytes(OutputFormat::Json).unwrap()).unwrap();
        assert_eq!(json[0]["x"], 0.1);
        assert_eq!(json[0]["note"], Value::Null);
    }

    #[test]
    fn floats_round_trip_through_text() {
        for x in [
            0.1 + 0.2,
            1.987_605_087_770_253e-58,
            6.02e23,
            -3.5e-7,
            0.0,
            12.5,
        ] {
            assert_eq!(Cell::Float(x).render().parse::<f64>().unwrap(), x);
        }
        assert_eq!(render_float(2.5e-9), "2.5e-9");
    }
}
