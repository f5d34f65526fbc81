//! Matrix file formats.
//!
//! * CSV: one matrix row per line, comma separated, numbers written with 17
//!   significant digits so values round-trip exactly.
//! * `GMX1` binary: the 4 magic bytes `GMX1`, then `rows` and `cols` as
//!   little-endian `u64`, then `rows·cols` little-endian `f64` in row-major
//!   order.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::{DenseMatrix, MatrixError, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"GMX1";

/// Format a float with 17 significant digits (lossless for `f64`).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(m: &DenseMatrix, mut out: W) -> Result<()> {
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|&x| fmt_f64(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Parse CSV; blank lines and lines starting with `#` are skipped.
pub fn read_csv<R: Read>(input: R) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for field in trimmed.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| MatrixError::Parse {
                line: idx + 1,
                message: format!("not a number: {:?}", field.trim()),
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(MatrixError::Parse {
                    line: idx + 1,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_binary<W: Write>(m: &DenseMatrix, mut out: W) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(m.rows() as u64).to_le_bytes())?;
    out.write_all(&(m.cols() as u64).to_le_bytes())?;
    for &x in m.data() {
        out.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<DenseMatrix> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(MatrixError::Parse { line: 0, message: "missing GMX1 magic".into() });
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows * cols {
        input.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    DenseMatrix::new(rows, cols, data)
}

/// Read a matrix, choosing the format from the file's leading bytes.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(BINARY_MAGIC) {
        read_binary(&bytes[..])
    } else {
        read_csv(&bytes[..])
    }
}

/// Write a matrix; `.bin`/`.gmx` extensions select the binary format.
pub fn write_matrix(m: &DenseMatrix, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") | Some("gmx") => write_binary(m, file),
        _ => write_csv(m, file),
    }
}
