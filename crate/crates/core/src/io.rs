//! File formats.
//!
//! Matrix files are plain text: a header line `n p`, then `n` lines of `p`
//! whitespace-separated decimals. Blank lines and lines starting with `#` or
//! `%` are ignored. Vectors use the same format with shape `n 1` (a `1 n`
//! file is accepted on read).
//!
//! Every writer goes through a temporary file in the target directory that is
//! renamed into place.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::counterexample::SparseInstance;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn format_matrix(x: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", x.rows(), x.cols());
    for i in 0..x.rows() {
        let line: Vec<String> = x.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str, origin: &Path) -> Result<DenseMatrix> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#') && !l.starts_with('%'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `n p` header".into()))?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(hline, format!("bad header: {e}")))?;
    let [rows, cols] = dims[..] else {
        return Err(parse_err(
            hline,
            format!("header needs two integers, got {}", dims.len()),
        ));
    };
    if rows == 0 || cols == 0 {
        return Err(parse_err(hline, "dimensions must be positive".into()));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (lineno, line) in lines {
        if seen == rows {
            return Err(parse_err(lineno, format!("more than {rows} data rows")));
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(lineno, format!("bad number: {e}")))?;
        if row.len() != cols {
            return Err(parse_err(
                lineno,
                format!("expected {cols} values, got {}", row.len()),
            ));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(lineno, "non-finite value".into()));
        }
        data.extend(row);
        seen += 1;
    }
    if seen != rows {
        return Err(parse_err(
            text.lines().count(),
            format!("expected {rows} data rows, got {seen}"),
        ));
    }
    DenseMatrix::new(rows, cols, data)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_matrix(&text, path)
}

pub fn write_matrix(path: &Path, x: &DenseMatrix) -> Result<()> {
    write_atomic(path, format_matrix(x).as_bytes())
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.cols() == 1 || m.rows() == 1 {
        Ok(m.as_slice().to_vec())
    } else {
        Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected a vector, got a {}x{} matrix", m.rows(), m.cols()),
        })
    }
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_matrix(path, &DenseMatrix::new(v.len(), 1, v.to_vec())?)
}

/// JSON sidecar describing a constructed instance. `S` is 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSidecar {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub gamma: f64,
    pub c_target: f64,
    pub beta: Vec<f64>,
    #[serde(rename = "S")]
    pub support: Vec<usize>,
}

impl From<&SparseInstance> for InstanceSidecar {
    fn from(inst: &SparseInstance) -> Self {
        InstanceSidecar {
            n: inst.n,
            p: inst.p,
            s: inst.s,
            gamma: inst.gamma,
            c_target: inst.c_target,
            beta: inst.beta.clone(),
            support: inst.support.iter().map(|j| j + 1).collect(),
        }
    }
}

pub const MATRIX_FILE: &str = "X.txt";
pub const RESPONSE_FILE: &str = "y.txt";
pub const SIDECAR_FILE: &str = "instance.json";

/// Writes `X.txt`, `y.txt` and `instance.json` into `dir`.
pub fn write_instance(dir: &Path, inst: &SparseInstance) -> Result<()> {
    write_matrix(&dir.join(MATRIX_FILE), &inst.x)?;
    write_vector(&dir.join(RESPONSE_FILE), &inst.y)?;
    write_json(&dir.join(SIDECAR_FILE), &InstanceSidecar::from(inst))
}

pub fn read_sidecar(path: &Path) -> Result<InstanceSidecar> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn csv_bytes<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush().map_err(|e| Error::io("<csv buffer>", e))?;
    writer
        .into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))
}

pub fn write_csv<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    write_atomic(path, &csv_bytes(records)?)
}
