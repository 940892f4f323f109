//! Output plumbing. Tabular results carry their column names and render as
//! CSV (with the resolved configuration embedded in `#` header lines) or as
//! a JSON document with the same payload; either way a rerun of the embedded
//! configuration reproduces the file byte for byte.

use std::fs;
use std::io::Write;
use std::path::Path;

use lasernoise_core::{Error, Result};
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// extra context lines (contour levels, effective-mode mapping, ...)
    pub comments: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            comments: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, config: &Value) -> String {
        match format {
            Format::Csv => self.render_csv(config),
            Format::Json => {
                let doc = document(
                    config,
                    serde_json::json!({
                        "comments": self.comments,
                        "columns": self.columns,
                        "rows": self.rows,
                    }),
                );
                render_json(&doc)
            }
        }
    }

    fn render_csv(&self, config: &Value) -> String {
        let mut s = String::new();
        s.push_str(&format!("# lasernoise {VERSION}\n"));
        s.push_str(&format!("# config = {config}\n"));
        for c in &self.comments {
            s.push_str(&format!("# {c}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(csv_cell).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// f64 -> JSON cell; non-finite values become null (empty CSV field).
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

/// Wrap a payload with the tool version and the resolved configuration.
pub fn document(config: &Value, body: Value) -> Value {
    let mut doc = serde_json::Map::new();
    doc.insert("version".into(), Value::String(VERSION.into()));
    doc.insert("config".into(), config.clone());
    if let Value::Object(map) = body {
        for (k, v) in map {
            doc.insert(k, v);
        }
    }
    Value::Object(doc)
}

pub fn render_json(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON serialization");
    s.push('\n');
    s
}

pub fn write_out(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| {
            Error::validation("out", format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| Error::validation("out", format!("stdout: {e}")))
        }
    }
}
