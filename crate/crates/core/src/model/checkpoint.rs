//! Parameter checkpoints.
//!
//! Text container mapping parameter name -> shape -> row-major values. Values
//! are written as the hexadecimal bit pattern of the f64, so a load after a
//! save reproduces every parameter bitwise.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::nd::DenseMatrix;

const MAGIC: &str = "mgal-checkpoint v1";

pub fn save_checkpoint(params: &ModelParams, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    for (name, m) in params.named() {
        out.push_str(&format!("param {name} {} {}\n", m.rows(), m.cols()));
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(|v| format!("{:016x}", v.to_bits())).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<ModelParams> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first == MAGIC => {}
        _ => return Err(parse_err(1, format!("expected header '{MAGIC}'"))),
    }

    struct Pending {
        name: String,
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    }

    let finalize = |p: Pending, lineno: usize| -> Result<(String, DenseMatrix)> {
        if p.data.len() != p.rows * p.cols {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno,
                msg: format!(
                    "parameter {} has {} values, expected {}",
                    p.name,
                    p.data.len(),
                    p.rows * p.cols
                ),
            });
        }
        Ok((p.name, raw_matrix(p.rows, p.cols, p.data)))
    };

    let mut entries: Vec<(String, DenseMatrix)> = Vec::new();
    let mut pending: Option<Pending> = None;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if let Some(rest) = line.strip_prefix("param ") {
            if let Some(p) = pending.take() {
                entries.push(finalize(p, lineno)?);
            }
            let mut parts = rest.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| parse_err(lineno, "missing parameter name".into()))?;
            let rows: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(lineno, "missing row count".into()))?;
            let cols: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(lineno, "missing column count".into()))?;
            pending = Some(Pending {
                name: name.to_string(),
                rows,
                cols,
                data: Vec::with_capacity(rows * cols),
            });
        } else if !line.trim().is_empty() {
            let p = pending
                .as_mut()
                .ok_or_else(|| parse_err(lineno, "values before any 'param' header".into()))?;
            let before = p.data.len();
            for token in line.split_whitespace() {
                let bits = u64::from_str_radix(token, 16)
                    .map_err(|_| parse_err(lineno, format!("bad value token '{token}'")))?;
                p.data.push(f64::from_bits(bits));
            }
            if p.data.len() - before != p.cols {
                return Err(parse_err(
                    lineno,
                    format!(
                        "expected {} values on the row, found {}",
                        p.cols,
                        p.data.len() - before
                    ),
                ));
            }
        }
    }
    if let Some(p) = pending.take() {
        entries.push(finalize(p, 0)?);
    }
    ModelParams::from_named(entries)
}

/// Builds without the finite check; checkpoints may legitimately hold any bit
/// pattern they were saved with.
fn raw_matrix(rows: usize, cols: usize, data: Vec<f64>) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(rows, cols);
    m.data_mut().copy_from_slice(&data);
    m
}
