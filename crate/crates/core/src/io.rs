//! File formats: matrix and model JSON, trajectory and trace CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::dynamics::{ParallelotopeTrace, VariationalFrame};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// CSV float format: 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{:.16e}", v)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Full(Matrix),
    Rows(Vec<Vec<f64>>),
}

/// Reads `{"rows", "cols", "data"}` or a bare array of rows.
pub fn parse_matrix(text: &str) -> Result<Matrix> {
    match serde_json::from_str::<MatrixInput>(text).map_err(|e| Error::Parse(e.to_string()))? {
        MatrixInput::Full(m) => Ok(m),
        MatrixInput::Rows(rows) => Matrix::from_rows(&rows),
    }
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    parse_matrix(&text).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))
}

fn push_row(out: &mut String, t: f64, values: impl IntoIterator<Item = f64>) {
    out.push_str(&fmt_float(t));
    for v in values {
        out.push(',');
        out.push_str(&fmt_float(v));
    }
    out.push('\n');
}

fn frame_label(col: usize, row: usize, n: usize, k: usize) -> String {
    if n < 10 && k < 10 {
        format!("w{}{}", col, row)
    } else {
        format!("w{}_{}", col, row)
    }
}

/// `t,x1,...,xn` followed by one row per sample.
pub fn trajectory_csv(times: &[f64], states: &[Vec<f64>]) -> String {
    let n = states.first().map_or(0, |s| s.len());
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x{}", i);
    }
    out.push('\n');
    for (t, x) in times.iter().zip(states) {
        push_row(&mut out, *t, x.iter().copied());
    }
    out
}

/// `t,x1,...,xn,w11,...` where `w{i}{j}` is component `j` of frame column `i`.
pub fn frame_csv(frame: &VariationalFrame) -> String {
    let n = frame.base.first().map_or(0, |s| s.len());
    let k = frame.k;
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x{}", i);
    }
    for c in 1..=k {
        for r in 1..=n {
            let _ = write!(out, ",{}", frame_label(c, r, n, k));
        }
    }
    out.push('\n');
    for ((t, x), w) in frame.times.iter().zip(&frame.base).zip(&frame.frames) {
        let cols = (0..k).flat_map(|c| (0..n).map(move |r| (r, c))).map(|(r, c)| w[(r, c)]);
        push_row(&mut out, *t, x.iter().copied().chain(cols));
    }
    out
}

/// `t,norm,log_norm`.
pub fn trace_csv(trace: &ParallelotopeTrace) -> String {
    let mut out = String::from("t,norm,log_norm\n");
    for (t, v) in trace.times.iter().zip(&trace.norms) {
        push_row(&mut out, *t, [*v, v.ln()]);
    }
    out
}

/// Reads a CSV with a header line and numeric columns `t, x1, ..., xn`
/// (extra columns are ignored beyond `n` when `n` is given).
pub fn read_trajectory_csv(path: &Path, n: Option<usize>) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (line_no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("{}:{}: {}", path.display(), line_no + 1, e)))?;
        if vals.len() < 2 {
            return Err(Error::Parse(format!("{}:{}: too few columns", path.display(), line_no + 1)));
        }
        let end = n.map_or(vals.len(), |n| (n + 1).min(vals.len()));
        times.push(vals[0]);
        states.push(vals[1..end].to_vec());
    }
    Ok((times, states))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, std::f64::consts::PI] {
            let s = fmt_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn matrix_input_forms() {
        let a = parse_matrix("[[1, 2], [3, 4]]").unwrap();
        let b = parse_matrix(r#"{"rows":2,"cols":2,"data":[[1,2],[3,4]]}"#).unwrap();
        assert_eq!(a, b);
        assert!(parse_matrix("[[1, 2], [3]]").is_err());
    }

    #[test]
    fn trajectory_header() {
        let csv = trajectory_csv(&[0.0], &[vec![1.0, 2.0]]);
        assert!(csv.starts_with("t,x1,x2\n"));
    }
}
