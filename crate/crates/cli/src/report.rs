//! CSV and JSON report files.
//!
//! CSV columns are fixed: `check_id,params,lhs,rhs,ratio,bound,status`.
//! Parameters share one column as `key=value` pairs joined by `;`, so checks
//! with different parameter sets keep one schema. Reals are written at 12
//! significant digits, non-finite reals as `nan`, `inf`, `-inf`, and a
//! missing bound as an empty field. In text parameters `%`, `;` and `=` are
//! percent-escaped, as is the first character of a text that would read as
//! a number.
//!
//! JSON is `{"records": [...], "summary": {...}}` with the same fields per
//! record; non-finite reals become the strings `"nan"`, `"inf"`, `"-inf"`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use qsobolev::harness::{format_real, parse_real, CheckRecord, ParamValue, Params, Report, Status};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;

pub const CSV_HEADER: [&str; 7] = ["check_id", "params", "lhs", "rhs", "ratio", "bound", "status"];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("malformed report: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn row_error(row: usize, message: impl Into<String>) -> ReportError {
    ReportError::Row {
        row,
        message: message.into(),
    }
}

/// Writes the report to `{prefix}.{csv|json}`, or to stdout without a prefix.
pub fn emit_report(report: &Report, format: Format, prefix: Option<&Path>) -> Result<Option<PathBuf>, ReportError> {
    let text = match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    };
    match prefix {
        Some(prefix) => {
            let mut name = prefix.as_os_str().to_owned();
            name.push(".");
            name.push(format.extension());
            let path = PathBuf::from(name);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&path, text)?;
            Ok(Some(path))
        }
        None => {
            io::stdout().lock().write_all(text.as_bytes())?;
            Ok(None)
        }
    }
}

/// Reads a report file back, choosing the format from the extension.
pub fn read_report(path: &Path) -> Result<Vec<CheckRecord>, ReportError> {
    let text = fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => parse_json(&text),
        _ => parse_csv(&text),
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let numeric = value_from_raw(text).is_some_and(|v| !matches!(v, ParamValue::Text(_)));
    for (i, c) in text.chars().enumerate() {
        if matches!(c, '%' | ';' | '=') || (i == 0 && numeric) {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        } else {
            out.push(c);
        }
    }
    out
}

fn unescape(text: &str) -> Option<String> {
    let bytes = text.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = text.get(i + 1..i + 3)?;
            out.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

fn encode_param(v: &ParamValue) -> String {
    match v {
        ParamValue::Text(s) => escape(s),
        other => other.to_string(),
    }
}

fn value_from_raw(raw: &str) -> Option<ParamValue> {
    if raw.contains('%') {
        return None;
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Some(ParamValue::Int(i));
    }
    match parse_real(raw) {
        Some(v) => Some(ParamValue::Real(v)),
        None => Some(ParamValue::Text(raw.to_string())),
    }
}

fn decode_param(raw: &str) -> Option<ParamValue> {
    value_from_raw(raw).or_else(|| unescape(raw).map(ParamValue::Text))
}

/// The parameter column.
pub fn params_field(params: &Params) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{}={}", escape(k), encode_param(v)))
        .collect::<Vec<_>>()
        .join(";")
}

/// Inverse of [`params_field`].
pub fn parse_params(text: &str) -> Option<Params> {
    let mut params = Params::new();
    if text.is_empty() {
        return Some(params);
    }
    for pair in text.split(';') {
        let (k, v) = pair.split_once('=')?;
        params.insert(unescape(k)?, decode_param(v)?);
    }
    Some(params)
}

pub fn to_csv(report: &Report) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("writing to memory");
    for r in report.records() {
        w.write_record([
            r.check_id.clone(),
            params_field(&r.params),
            format_real(r.lhs),
            format_real(r.rhs),
            format_real(r.ratio),
            r.bound.map(format_real).unwrap_or_default(),
            r.status.to_string(),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

pub fn parse_csv(text: &str) -> Result<Vec<CheckRecord>, ReportError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| row_error(1, e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(row_error(1, format!("expected header {}", CSV_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let n = i + 2;
        let row = row.map_err(|e| row_error(n, e.to_string()))?;
        if row.len() != CSV_HEADER.len() {
            return Err(row_error(n, format!("expected {} fields, found {}", CSV_HEADER.len(), row.len())));
        }
        let real = |k: usize| parse_real(&row[k]).ok_or_else(|| row_error(n, format!("bad {} `{}`", CSV_HEADER[k], &row[k])));
        out.push(CheckRecord {
            check_id: row[0].to_string(),
            params: parse_params(&row[1]).ok_or_else(|| row_error(n, format!("bad params `{}`", &row[1])))?,
            lhs: real(2)?,
            rhs: real(3)?,
            ratio: real(4)?,
            bound: if row[5].is_empty() { None } else { Some(real(5)?) },
            status: Status::parse(&row[6]).ok_or_else(|| row_error(n, format!("bad status `{}`", &row[6])))?,
        });
    }
    Ok(out)
}

fn real_value(v: f64) -> Value {
    if v.is_finite() {
        let rounded = parse_real(&format_real(v)).expect("formatted reals parse");
        serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
    } else {
        Value::String(format_real(v))
    }
}

fn value_real(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => parse_real(s).filter(|x| !x.is_finite()),
        _ => None,
    }
}

fn param_value(v: &ParamValue) -> Value {
    match v {
        ParamValue::Real(x) => real_value(*x),
        ParamValue::Int(i) => Value::from(*i),
        ParamValue::Text(s) => Value::String(s.clone()),
    }
}

fn value_param(v: &Value) -> Option<ParamValue> {
    match v {
        Value::Number(n) if n.is_i64() => n.as_i64().map(ParamValue::Int),
        Value::Number(n) => n.as_f64().map(ParamValue::Real),
        Value::String(s) => Some(match parse_real(s).filter(|x| !x.is_finite()) {
            Some(x) => ParamValue::Real(x),
            None => ParamValue::Text(s.clone()),
        }),
        _ => None,
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    check_id: String,
    params: BTreeMap<String, Value>,
    lhs: Value,
    rhs: Value,
    ratio: Value,
    bound: Option<Value>,
    status: String,
}

#[derive(Serialize, Deserialize)]
struct JsonSummary {
    total: usize,
    pass: usize,
    fail: usize,
    report_only: usize,
    worst: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    records: Vec<JsonRecord>,
    summary: JsonSummary,
}

pub fn to_json(report: &Report) -> String {
    let summary = report.summary();
    let doc = JsonReport {
        records: report
            .records()
            .iter()
            .map(|r| JsonRecord {
                check_id: r.check_id.clone(),
                params: r.params.iter().map(|(k, v)| (k.clone(), param_value(v))).collect(),
                lhs: real_value(r.lhs),
                rhs: real_value(r.rhs),
                ratio: real_value(r.ratio),
                bound: r.bound.map(real_value),
                status: r.status.to_string(),
            })
            .collect(),
        summary: JsonSummary {
            total: summary.total,
            pass: summary.pass,
            fail: summary.fail,
            report_only: summary.report_only,
            worst: summary.worst.iter().map(|(k, v)| (k.clone(), real_value(*v))).collect(),
        },
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

pub fn parse_json(text: &str) -> Result<Vec<CheckRecord>, ReportError> {
    let doc: JsonReport = serde_json::from_str(text).map_err(|e| ReportError::Format(e.to_string()))?;
    doc.records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let bad = |what: &str| row_error(i + 1, format!("bad {what} in record `{}`", r.check_id));
            let real = |v: &Value, what: &str| value_real(v).ok_or_else(|| bad(what));
            let mut params = Params::new();
            for (k, v) in &r.params {
                params.insert(k.clone(), value_param(v).ok_or_else(|| bad(k))?);
            }
            Ok(CheckRecord {
                check_id: r.check_id.clone(),
                params,
                lhs: real(&r.lhs, "lhs")?,
                rhs: real(&r.rhs, "rhs")?,
                ratio: real(&r.ratio, "ratio")?,
                bound: match &r.bound {
                    None | Some(Value::Null) => None,
                    Some(v) => Some(real(v, "bound")?),
                },
                status: Status::parse(&r.status).ok_or_else(|| bad("status"))?,
            })
        })
        .collect()
}
