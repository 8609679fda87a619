use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array1;

use super::IoError;
use crate::bench::ExperimentReport;
use crate::trace::IterateTrace;

pub const REPORT_COLUMNS: [&str; 13] = [
    "method",
    "n",
    "s",
    "iters_mean",
    "iters_std",
    "time_mean",
    "time_std",
    "relerr_mean",
    "relerr_std",
    "l0_mean",
    "ncf_total_mean",
    "ncgf_total_mean",
    "restart_rate",
];

pub const TRACE_COLUMNS: [&str; 6] = ["k", "H", "step_norm", "gap_norm", "support_size", "restarted"];

/// `%g` with six significant digits: fixed notation for exponents in
/// `[−4, 6)`, scientific otherwise, trailing zeros dropped.
pub fn format_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    format_g6(v.unwrap_or(f64::NAN))
}

/// Header plus one line per row, sorted by `(method, n, s)`.
pub fn write_report_csv(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut sorted = report.clone();
    sorted.sort();
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(REPORT_COLUMNS).map_err(csv_err)?;
    for r in &sorted.rows {
        w.write_record([
            r.method.name().to_string(),
            r.n.to_string(),
            r.s.to_string(),
            format_g6(r.iters_mean),
            format_g6(r.iters_std),
            format_g6(r.time_mean),
            format_g6(r.time_std),
            opt(r.relerr_mean),
            opt(r.relerr_std),
            format_g6(r.l0_mean),
            format_g6(r.ncf_total_mean),
            format_g6(r.ncgf_total_mean),
            format_g6(r.restart_rate),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

pub fn write_report_json(report: &ExperimentReport, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut sorted = report.clone();
    sorted.sort();
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &sorted).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| IoError::io(path, e))
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<ExperimentReport, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// One row per iteration; floats in shortest round-trip form.
pub fn write_trace_csv(trace: &IterateTrace, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(TRACE_COLUMNS).map_err(csv_err)?;
    for r in trace.records() {
        w.write_record([
            r.k.to_string(),
            r.objective.to_string(),
            r.step_norm.to_string(),
            r.gap_norm.to_string(),
            r.support.len().to_string(),
            u8::from(r.restarted).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

/// One value per line, shortest round-trip form.
pub fn write_vector(x: &Array1<f64>, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = BufWriter::new(file);
    x.iter()
        .try_for_each(|v| writeln!(w, "{v}"))
        .and_then(|_| w.flush())
        .map_err(|e| IoError::io(path, e))
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Array1<f64>, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(tok.parse().map_err(|_| IoError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            token: tok.to_string(),
        })?);
    }
    Ok(Array1::from(out))
}
