//! CSV and JSON rendering of command results.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde_json::{Map, Value};

use crate::config::{OutputSpec, OUTPUT_DIR_VAR};
use crate::error::{CliError, Result};
use crate::settings::Format;

pub const SCHEMA_VERSION: u64 = 1;

/// A table plus scalar summary fields.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    /// JSON key of the table.
    pub table: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    /// Extra JSON fields; not part of the CSV.
    pub summary: Map<String, Value>,
    /// Put the single row's fields at the top level of the JSON document.
    pub flatten: bool,
}

impl Report {
    pub fn new(command: &'static str, table: &'static str, columns: &[&str]) -> Self {
        Self {
            command,
            table,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Map::new(),
            flatten: false,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }
}

/// `x` with 17 significant digits, fixed notation for moderate exponents.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        sci
    }
}

/// JSON number carrying the 17-digit text; `null` when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(format_f64(x).parse().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn int(k: usize) -> Value {
    Value::from(k as u64)
}

pub fn text(s: &str) -> Value {
    Value::String(s.to_string())
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_csv(report: &Report) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&report.columns)?;
    for row in &report.rows {
        w.write_record(row.iter().map(csv_cell))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn to_json_value(report: &Report) -> Value {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    doc.insert("command".into(), text(report.command));
    doc.extend(report.summary.clone());
    let record = |row: &Vec<Value>| -> Map<String, Value> {
        report.columns.iter().cloned().zip(row.iter().cloned()).collect()
    };
    if report.flatten && report.rows.len() == 1 {
        doc.extend(record(&report.rows[0]));
    } else {
        let rows = report.rows.iter().map(|r| Value::Object(record(r))).collect();
        doc.insert(report.table.into(), Value::Array(rows));
    }
    Value::Object(doc)
}

pub fn to_json(report: &Report) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(&to_json_value(report))?;
    out.push(b'\n');
    Ok(out)
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    }
}

/// Destination file, or `None` for standard output.
pub fn destination(command: &str, output: &OutputSpec) -> Option<PathBuf> {
    let file_name = format!("{command}.{}", output.format.extension());
    match &output.path {
        Some(p) if p.is_dir() => Some(p.join(file_name)),
        Some(p) => Some(p.clone()),
        None => std::env::var_os(OUTPUT_DIR_VAR).filter(|d| !d.is_empty()).map(|d| PathBuf::from(d).join(file_name)),
    }
}

pub fn write(report: &Report, output: &OutputSpec) -> Result<Option<PathBuf>> {
    let bytes = render(report, output.format)?;
    match destination(report.command, output) {
        Some(path) => {
            fs::write(&path, &bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(Some(path))
        }
        None => {
            std::io::stdout().lock().write_all(&bytes)?;
            Ok(None)
        }
    }
}
