//! Tidy report tables and their CSV / JSON renderings.

use std::io::Write;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::Result;

/// A table of rows plus a summary; `pass` drives the exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    pub summary: Map<String, Value>,
    pub pass: bool,
    /// Failing rows, as objects.
    pub counterexamples: Vec<Value>,
}

impl Report {
    pub fn new(experiment: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            experiment,
            columns,
            rows: Vec::new(),
            summary: Map::new(),
            pass: true,
            counterexamples: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Marks the report failed and keeps `row` as a counterexample.
    pub fn fail_with(&mut self, row: &[Value]) {
        self.pass = false;
        self.counterexamples.push(Value::Object(self.object(row)));
    }

    pub fn object(&self, row: &[Value]) -> Map<String, Value> {
        self.columns
            .iter()
            .zip(row)
            .map(|(c, v)| (c.to_string(), v.clone()))
            .collect()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(cell))?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut doc = Map::new();
        doc.insert("experiment".into(), Value::from(self.experiment));
        doc.insert("pass".into(), Value::from(self.pass));
        doc.insert("summary".into(), Value::Object(self.summary.clone()));
        doc.insert(
            "rows".into(),
            Value::Array(self.rows.iter().map(|r| Value::Object(self.object(r))).collect()),
        );
        doc.insert("counterexamples".into(), Value::Array(self.counterexamples.clone()));
        let mut out = serde_json::to_vec_pretty(&Value::Object(doc))?;
        out.write_all(b"\n")?;
        Ok(out)
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Float as a JSON value; non-finite numbers become strings.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::from(x.to_string()), Value::Number)
}
