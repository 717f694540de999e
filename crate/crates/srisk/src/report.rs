//! Structured result emission: CSV (with a header row) and JSONL.
//!
//! Byte-identical output for identical inputs is a hard requirement — the
//! whole experiment pipeline is seeded — so serialization is deliberately
//! boring: fields keep their insertion order, floats are always printed in
//! scientific notation with 12 significant digits, and nothing depends on
//! hash-map iteration order.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// A single cell value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Free text (quoted/escaped as needed per format).
    Str(String),
    /// Signed integer (counts, indices).
    Int(i64),
    /// Unsigned integer; kept separate so 64-bit seeds survive unscathed.
    UInt(u64),
    /// Floating-point number, serialized with 12 significant digits;
    /// non-finite values become `null` (JSONL) / empty (CSV).
    Num(f64),
    /// Boolean flag.
    Bool(bool),
    /// Explicitly absent value: `null` in JSONL, empty cell in CSV.
    Null,
}

/// One output row: named cells in a fixed order.
///
/// All rows passed to a single [`emit`] call must share the same field
/// names in the same order (they form the CSV header).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    fields: Vec<(&'static str, Value)>,
}

impl Row {
    /// Empty row; chain the typed push methods to fill it.
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a text field.
    pub fn str(mut self, name: &'static str, v: impl Into<String>) -> Self {
        self.fields.push((name, Value::Str(v.into())));
        self
    }

    /// Appends a signed integer field.
    pub fn int(mut self, name: &'static str, v: i64) -> Self {
        self.fields.push((name, Value::Int(v)));
        self
    }

    /// Appends an unsigned integer field (seeds, counts).
    pub fn uint(mut self, name: &'static str, v: u64) -> Self {
        self.fields.push((name, Value::UInt(v)));
        self
    }

    /// Appends a float field.
    pub fn num(mut self, name: &'static str, v: f64) -> Self {
        self.fields.push((name, Value::Num(v)));
        self
    }

    /// Appends a boolean field.
    pub fn bool(mut self, name: &'static str, v: bool) -> Self {
        self.fields.push((name, Value::Bool(v)));
        self
    }

    /// Appends a float field that may be absent.
    pub fn opt_num(mut self, name: &'static str, v: Option<f64>) -> Self {
        self.fields.push((name, v.map_or(Value::Null, Value::Num)));
        self
    }

    /// Appends a boolean field that may be absent.
    pub fn opt_bool(mut self, name: &'static str, v: Option<bool>) -> Self {
        self.fields.push((name, v.map_or(Value::Null, Value::Bool)));
        self
    }

    /// Field names in insertion order.
    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.iter().map(|&(name, _)| name)
    }

    /// Looks a field up by name (test convenience).
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.fields.iter().find(|&&(n, _)| n == name).map(|(_, v)| v)
    }
}

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Comma-separated values with one header row.
    Csv,
    /// One JSON object per line.
    Jsonl,
}

impl OutputFormat {
    /// Parses `csv` or `jsonl`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec {
            "csv" => Ok(Self::Csv),
            "jsonl" => Ok(Self::Jsonl),
            other => Err(Error::Config(format!("unknown output format {other:?}; expected csv or jsonl"))),
        }
    }
}

/// Floats with 12 significant digits, always scientific: stable width, no
/// locale surprises, and enough digits that re-parsing is lossless for every
/// value the experiments produce.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Str(s) => csv_escape(s),
        Value::Int(i) => i.to_string(),
        Value::UInt(u) => u.to_string(),
        Value::Num(x) if x.is_finite() => fmt_float(*x),
        Value::Num(_) | Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
    }
}

fn json_cell(v: &Value) -> String {
    match v {
        Value::Str(s) => format!("\"{}\"", json_escape(s)),
        Value::Int(i) => i.to_string(),
        Value::UInt(u) => u.to_string(),
        Value::Num(x) if x.is_finite() => fmt_float(*x),
        Value::Num(_) | Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
    }
}

/// Renders rows to a single in-memory string in the requested format.
pub fn render(rows: &[Row], format: OutputFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Domain("emit requires at least one row".into()));
    }
    let header: Vec<&'static str> = rows[0].names().collect();
    for (idx, row) in rows.iter().enumerate() {
        if row.names().collect::<Vec<_>>() != header {
            return Err(Error::Domain(format!(
                "row {idx} does not share the first row's schema; all rows in one table must"
            )));
        }
    }

    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                let line: Vec<String> = row.fields.iter().map(|(_, v)| csv_cell(v)).collect();
                out.push_str(&line.join(","));
                out.push('\n');
            }
        }
        OutputFormat::Jsonl => {
            for row in rows {
                out.push('{');
                for (idx, (name, v)) in row.fields.iter().enumerate() {
                    if idx > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "\"{}\":{}", json_escape(name), json_cell(v));
                }
                out.push_str("}\n");
            }
        }
    }
    Ok(out)
}

/// Writes rows to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[Row], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = render(rows, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let stdout = std::io::stdout();
            stdout.lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}
