//! Matrix and label file formats.
//!
//! * CSV: one row per feature, comma-separated; samples are columns.
//! * Binary: `b"SGC1"`, `u32` rows, `u32` columns, then `rows · cols`
//!   little-endian `f64` values in column-major order.
//! * Labels: one integer per line, re-indexed densely on load.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::metrics::GroundTruth;
use crate::solvers::DataMatrix;
use crate::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"SGC1";
const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Binary,
}

impl std::str::FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(MatrixFormat::Csv),
            "binary" | "bin" | "sgc1" => Ok(MatrixFormat::Binary),
            other => Err(Error::Parameter(format!(
                "unknown matrix format {other:?} (expected csv or binary)"
            ))),
        }
    }
}

fn parse_error(path: &Path, location: String, message: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("{}: {location}", path.display()),
        message: message.into(),
    }
}

pub fn load_matrix(path: impl AsRef<Path>, format: MatrixFormat) -> Result<DataMatrix> {
    let path = path.as_ref();
    let values = match format {
        MatrixFormat::Csv => read_csv(path)?,
        MatrixFormat::Binary => read_binary(path)?,
    };
    DataMatrix::new(values)
}

fn read_csv(path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path)(io),
            other => parse_error(path, "open".into(), format!("{other:?}")),
        })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(path, format!("line {line}"), e.to_string())
        })?;
        let line = record
            .position()
            .map_or(rows.len() as u64 + 1, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(f, field)| {
                let v: f64 = field.parse().map_err(|_| {
                    parse_error(
                        path,
                        format!("line {line}, field {}", f + 1),
                        format!("cannot parse {field:?} as a number"),
                    )
                })?;
                if !v.is_finite() {
                    return Err(parse_error(
                        path,
                        format!("line {line}, field {}", f + 1),
                        format!("non-finite value {field:?}"),
                    ));
                }
                Ok(v)
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_error(
                    path,
                    format!("line {line}"),
                    format!("expected {} fields, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(path, "line 1".into(), "empty matrix file"));
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

fn read_binary(path: &Path) -> Result<DMatrix<f64>> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    if bytes.len() < HEADER_LEN {
        return Err(parse_error(
            path,
            "byte offset 0".into(),
            "truncated header",
        ));
    }
    if &bytes[..4] != BINARY_MAGIC {
        return Err(parse_error(
            path,
            "byte offset 0".into(),
            "bad magic, expected SGC1",
        ));
    }
    let m = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
    let n = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    let expected = HEADER_LEN + 8 * m * n;
    if bytes.len() != expected {
        return Err(parse_error(
            path,
            format!("byte offset {}", bytes.len().min(expected)),
            format!(
                "{m}x{n} payload needs {expected} bytes, file has {}",
                bytes.len()
            ),
        ));
    }
    let mut values = Vec::with_capacity(m * n);
    for (k, chunk) in bytes[HEADER_LEN..].chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        if !v.is_finite() {
            return Err(parse_error(
                path,
                format!(
                    "byte offset {} (row {}, column {})",
                    HEADER_LEN + 8 * k,
                    k % m.max(1),
                    k / m.max(1)
                ),
                "non-finite value",
            ));
        }
        values.push(v);
    }
    Ok(DMatrix::from_vec(m, n, values))
}

pub fn save_matrix(path: impl AsRef<Path>, y: &DataMatrix, format: MatrixFormat) -> Result<()> {
    let path = path.as_ref();
    let y = y.as_matrix();
    let mut out = Vec::new();
    match format {
        MatrixFormat::Csv => {
            for row in y.row_iter() {
                let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                out.extend_from_slice(fields.join(",").as_bytes());
                out.push(b'\n');
            }
        }
        MatrixFormat::Binary => {
            let dim = |d: usize| {
                u32::try_from(d).map_err(|_| Error::Dimension(format!("{d} exceeds u32 range")))
            };
            out.extend_from_slice(BINARY_MAGIC);
            out.extend_from_slice(&dim(y.nrows())?.to_le_bytes());
            out.extend_from_slice(&dim(y.ncols())?.to_le_bytes());
            for v in y.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    fs::write(path, out).map_err(Error::io(path))
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let field = line.trim();
        if field.is_empty() {
            return Err(parse_error(
                path,
                format!("line {line_no}"),
                "missing label",
            ));
        }
        let v: i64 = field.parse().map_err(|_| {
            parse_error(
                path,
                format!("line {line_no}"),
                format!("cannot parse {field:?} as an integer label"),
            )
        })?;
        raw.push(v);
    }
    if raw.is_empty() {
        return Err(parse_error(path, "line 1".into(), "empty label file"));
    }
    Ok(GroundTruth::from_raw(&raw))
}

pub fn save_labels(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for l in truth.labels() {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(Error::io(path))
}
