//! Tabular datasets serialized as CSV (17 significant digits) and JSON.

use std::fs;
use std::path::{Path, PathBuf};

use dg2inst::config::OutputFormat;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

/// Scientific notation with 17 significant digits; `nan`, `inf`, `-inf`
/// for non-finite values.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Real(x) => format_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Real(x) => Number::from_f64(*x).map_or_else(|| Value::String(format_real(*x)), Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Dataset {
            name: name.to_string(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("dataset".into(), Value::String(self.name.clone()));
        doc.insert("columns".into(), Value::from(self.columns.clone()));
        doc.insert("records".into(), Value::Array(records));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
        s.push('\n');
        s
    }

    /// Writes `<dir>/<name>.csv` and/or `.json`; returns the written paths.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
            let p = dir.join(format!("{}.csv", self.name));
            fs::write(&p, self.to_csv())?;
            written.push(p);
        }
        if matches!(format, OutputFormat::Json | OutputFormat::Both) {
            let p = dir.join(format!("{}.json", self.name));
            fs::write(&p, self.to_json())?;
            written.push(p);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-300, -2.5e17] {
            let s = format_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
        assert_eq!(format_real(f64::NAN), "nan");
    }

    #[test]
    fn csv_and_json_agree() {
        let mut d = Dataset::new("t", &["r", "label", "k"]);
        d.push(vec![0.5.into(), "a,b".into(), 3u32.into()]);
        assert_eq!(d.to_csv(), "r,label,k\n5.0000000000000000e-1,\"a,b\",3\n");
        let v: Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(v["records"][0]["r"], 0.5);
        assert_eq!(v["records"][0]["label"], "a,b");
    }
}
