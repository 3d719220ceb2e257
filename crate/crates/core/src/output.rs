//! CSV/JSON table emitter with locale-free, 12-significant-digit floats.

use std::io::Write;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Float(f64),
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Float(x) => fmt_f64(*x),
            Value::Int(i) => i.to_string(),
            Value::Str(s) => s.clone(),
            // 0/1 keeps boolean columns numeric for any CSV consumer
            Value::Bool(b) => if *b { "1".into() } else { "0".into() },
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::Float(x) => serde_json::Value::String(fmt_f64(*x)),
            Value::Int(i) => serde_json::Value::from(*i),
            Value::Str(s) => serde_json::Value::from(s.as_str()),
            Value::Bool(b) => serde_json::Value::from(*b),
        }
    }
}

/// 12 significant digits in scientific notation, '.' decimal separator.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".into();
    }
    format!("{:.11e}", x)
}

/// Columnar table accumulated row by row, then rendered as CSV or JSON.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, mut w: W) -> Result<()> {
        match format {
            Format::Csv => {
                writeln!(w, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let fields: Vec<String> = row.iter().map(Value::csv).collect();
                    writeln!(w, "{}", fields.join(","))?;
                }
            }
            Format::Json => {
                // BTreeMap-backed serde_json::Map gives a stable key order
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = serde_json::Map::new();
                        for (name, value) in self.columns.iter().zip(row) {
                            obj.insert(name.clone(), value.json());
                        }
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut w, &rows)
                    .map_err(std::io::Error::other)?;
                writeln!(w)?;
            }
        }
        Ok(())
    }

    pub fn render(&self, format: Format) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(String::from_utf8(buf).expect("tables are ascii"))
    }
}
