use std::io::Write;

use dbarg_core::error::{Error, ErrorClass};
use dbarg_core::selftest::ErrorInfo;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;
use crate::config::RunConfig;

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Finite floats as JSON numbers; the rest as `"inf"`, `"-inf"`, `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn error_value(e: &Error) -> Value {
    serde_json::to_value(ErrorInfo::from(e)).expect("error info serializes")
}

/// What a subcommand produced, before formatting.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Vec<Value>,
    pub summary: Option<Value>,
    pub errors: Vec<Value>,
    /// Set when every computation ran but a check did not hold.
    pub failed: bool,
}

impl Outcome {
    pub fn rows(results: Vec<Value>) -> Self {
        Self {
            results,
            ..Self::default()
        }
    }

    pub fn with_summary(mut self, summary: Value) -> Self {
        self.summary = Some(summary);
        self
    }

    pub fn from_error(e: &Error) -> Self {
        Self {
            errors: vec![error_value(e)],
            ..Self::default()
        }
    }

    /// Convergence failures outrank domain errors, which outrank failed checks.
    pub fn exit_code(&self) -> i32 {
        let convergence = serde_json::to_value(ErrorClass::Convergence).expect("class serializes");
        if self.errors.iter().any(|e| e.get("class") == Some(&convergence)) {
            EXIT_CONVERGENCE
        } else if !self.errors.is_empty() {
            EXIT_DOMAIN
        } else if self.failed {
            EXIT_FAILED
        } else {
            EXIT_OK
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub command: &'a str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub results: &'a [Value],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<&'a Value>,
    pub errors: &'a [Value],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>, String> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| e.to_string())?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => csv_rows(report.results),
    }
}

/// Header from the first row's keys; nested values are embedded as JSON text.
fn csv_rows(rows: &[Value]) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let empty = Map::new();
    let header: Vec<&String> = rows
        .first()
        .and_then(Value::as_object)
        .unwrap_or(&empty)
        .keys()
        .collect();
    if !header.is_empty() {
        w.write_record(&header).map_err(|e| e.to_string())?;
    }
    for row in rows {
        let obj = row.as_object().unwrap_or(&empty);
        let record: Vec<String> = header
            .iter()
            .map(|k| match obj.get(*k) {
                None | Some(Value::Null) => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
            })
            .collect();
        w.write_record(&record).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

pub fn emit(bytes: &[u8], path: Option<&std::path::Path>) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => std::io::stdout().write_all(bytes).map_err(|e| e.to_string()),
    }
}
