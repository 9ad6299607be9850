//! Rendering bound tables: round-up decimal strings, CSV, JSON and text.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid::{BoundRecord, Method};
use crate::specfun::LogScaled;

/// Smallest `sig_digits`-digit decimal `>= v`, as `"2.451e-3"`.
///
/// A relative slack of `1e-12` absorbs rounding in the log-space value, so
/// an exactly representable decimal is not bumped to the next one.
pub fn render_round_up(v: LogScaled, sig_digits: usize) -> String {
    let digits = sig_digits.max(1);
    if v.is_zero() {
        return format!("{:.*}e0", digits - 1, 0.0);
    }
    let (mantissa, mut exp) = v.scientific();
    let unit = 10f64.powi(digits as i32 - 1);
    let mut q = (mantissa * unit * (1.0 - 1e-12)).ceil();
    if q >= 10.0 * unit {
        q = unit;
        exp += 1;
    }
    format!("{:.*}e{exp}", digits - 1, q / unit)
}

/// One `(n, method)` line of the CSV and JSON outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub method: Method,
    pub value_log10: f64,
    pub value_rounded: String,
    pub k_star: Option<usize>,
    pub theta_star: Option<f64>,
}

impl Record {
    pub fn value(&self) -> LogScaled {
        LogScaled::from_log10(self.value_log10)
    }
}

impl From<&BoundRecord> for Record {
    fn from(b: &BoundRecord) -> Self {
        Record {
            n: b.dimension,
            method: b.method,
            value_log10: b.value.log10(),
            value_rounded: render_round_up(b.value, 4),
            k_star: b.k_star,
            theta_star: b.theta_star,
        }
    }
}

/// One dimension of a bound table, methods in column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub entries: Vec<(Method, String, Option<usize>)>,
}

/// Groups records by dimension, keeping the first-seen method order.
pub fn table_rows(records: &[Record]) -> Vec<TableRow> {
    let mut rows: BTreeMap<usize, TableRow> = BTreeMap::new();
    for r in records {
        rows.entry(r.n)
            .or_insert_with(|| TableRow { n: r.n, entries: Vec::new() })
            .entries
            .push((r.method, r.value_rounded.clone(), r.k_star));
    }
    rows.into_values().collect()
}

const CSV_HEADER: [&str; 6] = ["n", "method", "value_log10", "value_rounded", "k_star", "theta_star"];

pub fn to_csv(records: &[Record]) -> Result<String> {
    // explicit header, so an empty table still carries one
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(|e| Error::domain("to_csv", e.to_string()))?;
    for r in records {
        w.serialize(r).map_err(|e| Error::domain("to_csv", e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::domain("to_csv", e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::domain("to_csv", e.to_string()))
}

pub fn parse_csv(text: &str) -> Result<Vec<Record>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| Error::domain("parse_csv", e.to_string()))?;
    if header != CSV_HEADER.as_slice() {
        return Err(Error::domain("parse_csv", format!("unexpected header {header:?}")));
    }
    rd.deserialize()
        .map(|r| r.map_err(|e| Error::domain("parse_csv", e.to_string())))
        .collect()
}

pub fn to_json(records: &[Record]) -> Result<String> {
    serde_json::to_string_pretty(records).map_err(|e| Error::domain("to_json", e.to_string()))
}

pub fn parse_json(text: &str) -> Result<Vec<Record>> {
    serde_json::from_str(text).map_err(|e| Error::domain("parse_json", e.to_string()))
}

/// Fixed-width table, one row per dimension and one column per method.
pub fn to_text(records: &[Record]) -> String {
    let rows = table_rows(records);
    let mut methods: Vec<Method> = Vec::new();
    for r in records {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let mut out = format!("{:>5}", "n");
    for m in &methods {
        let _ = write!(out, "  {:>16}", m.id());
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{:>5}", row.n);
        for m in &methods {
            let cell = match row.entries.iter().find(|e| e.0 == *m) {
                Some((_, v, Some(k))) => format!("{v} (k={k})"),
                Some((_, v, None)) => v.clone(),
                None => "-".into(),
            };
            let _ = write!(out, "  {cell:>16}");
        }
        out.push('\n');
    }
    out
}
