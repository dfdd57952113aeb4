//! Minimal MatrixMarket reader and writer for dense real matrices.
//!
//! Reads `coordinate` and `array` layouts with `real` or `integer` fields
//! and `general`, `symmetric` or `skew-symmetric` symmetry. Writes the
//! `array real general` layout.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matcore::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_header(line: &str) -> Result<(Layout, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(format!(
            "header must read \"%%MatrixMarket matrix <layout> <field> <symmetry>\", got {line:?}"
        )));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(format!("unsupported layout {other:?}"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(parse_err(format!("unsupported field {other:?}"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parse_err(format!("unsupported symmetry {other:?}"))),
    };
    Ok((layout, symmetry))
}

fn parse_usize(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| parse_err(format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(format!("invalid {what}")))
}

fn parse_f64(tok: Option<&str>) -> Result<f64> {
    let t = tok.ok_or_else(|| parse_err("missing value"))?;
    let v: f64 = t.parse().map_err(|_| parse_err(format!("invalid value {t:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(format!("non-finite value {t:?}")));
    }
    Ok(v)
}

/// Parses MatrixMarket text into a dense matrix.
pub fn parse_mtx(text: &str) -> Result<Matrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty MatrixMarket file"))?;
    let (layout, symmetry) = parse_header(header)?;
    let mut body = lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('%'));

    let size = body.next().ok_or_else(|| parse_err("missing size line"))?;
    let mut it = size.split_whitespace();
    let rows = parse_usize(it.next(), "row count")?;
    let cols = parse_usize(it.next(), "column count")?;
    if rows == 0 || cols == 0 {
        return Err(parse_err("matrix dimensions must be positive"));
    }
    if symmetry != Symmetry::General && rows != cols {
        return Err(parse_err("symmetric storage requires a square matrix"));
    }
    let mut m = Matrix::zeros(rows, cols);

    match layout {
        Layout::Coordinate => {
            let nnz = parse_usize(it.next(), "entry count")?;
            let mut seen = 0;
            for line in body {
                let mut t = line.split_whitespace();
                let i = parse_usize(t.next(), "row index")?;
                let j = parse_usize(t.next(), "column index")?;
                let v = parse_f64(t.next())?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(format!("index ({i}, {j}) out of range")));
                }
                let (i, j) = (i - 1, j - 1);
                m[(i, j)] += v;
                if i != j {
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => m[(j, i)] += v,
                        Symmetry::SkewSymmetric => m[(j, i)] -= v,
                    }
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(format!("expected {nnz} entries, found {seen}")));
            }
        }
        Layout::Array => {
            let values: Vec<f64> = body
                .flat_map(str::split_whitespace)
                .map(|t| parse_f64(Some(t)))
                .collect::<Result<_>>()?;
            // column-major, lower triangle only for symmetric variants
            let mut positions = Vec::new();
            for j in 0..cols {
                let start = match symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::SkewSymmetric => j + 1,
                };
                for i in start..rows {
                    positions.push((i, j));
                }
            }
            if values.len() != positions.len() {
                return Err(parse_err(format!(
                    "expected {} array values, found {}",
                    positions.len(),
                    values.len()
                )));
            }
            for (&(i, j), &v) in positions.iter().zip(&values) {
                m[(i, j)] = v;
                match symmetry {
                    Symmetry::General => {}
                    Symmetry::Symmetric => m[(j, i)] = v,
                    Symmetry::SkewSymmetric => m[(j, i)] = -v,
                }
            }
        }
    }
    Ok(m)
}

/// Renders `m` as `array real general`.
pub fn format_mtx(m: &Matrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", m.rows(), m.cols());
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let _ = writeln!(out, "{:e}", m[(i, j)]);
        }
    }
    out
}

pub fn read_mtx(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path)?;
    parse_mtx(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_mtx(path: &Path, m: &Matrix) -> Result<()> {
    fs::write(path, format_mtx(m))?;
    Ok(())
}
