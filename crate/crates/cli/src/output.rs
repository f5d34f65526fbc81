//! Provenance and file output.
//!
//! Every file the tool writes records the configuration hash and seed that
//! produced it:
//!
//! * CSV files (matrices, contour grids, results) start with the comment
//!   line `# config_hash=<hash> seed=<seed>`, which the readers skip;
//! * JSON documents carry top-level `config_hash` and `seed` fields;
//! * binary `GMX1` matrices have no room for metadata, so a sidecar
//!   `<file>.provenance.json` is written next to them.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use matrixkit::io::{write_binary, write_csv};
use matrixkit::DenseMatrix;
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Configuration hash and seed of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunInfo {
    pub config_hash: String,
    pub seed: u64,
}

impl RunInfo {
    /// Hash of the canonical (key-sorted) JSON form of the effective
    /// parameters: the first 16 hex digits of its SHA-256.
    pub fn from_params(params: &Value, seed: u64) -> Self {
        Self { config_hash: hash_value(params), seed }
    }

    /// `# config_hash=… seed=…`, the first line of every CSV output.
    pub fn csv_comment(&self) -> String {
        format!("# config_hash={} seed={}", self.config_hash, self.seed)
    }

    /// The reproducibility line printed by every run.
    pub fn banner(&self) -> String {
        format!("grdpg {} seed={} config_hash={}", env!("CARGO_PKG_VERSION"), self.seed, self.config_hash)
    }
}

pub fn hash_value(v: &Value) -> String {
    // serde_json maps are ordered by key, so this serialisation is canonical.
    hash_bytes(serde_json::to_string(v).expect("JSON values serialise").as_bytes())
}

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn hash_bytes(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Content digest of an input file, so that hashes of commands reading
/// files depend on what was read rather than on the path.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    Ok(hash_bytes(&bytes))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    let f = File::create(path).map_err(|e| CliError::runtime(format!("cannot create {}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn is_binary(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("bin") | Some("gmx"))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".provenance.json");
    path.with_file_name(name)
}

/// Serialise `body` (which must be a JSON object) with `config_hash` and
/// `seed` added at the top level.
pub fn with_provenance<T: Serialize>(body: &T, info: &RunInfo) -> Result<Value> {
    let mut map = match serde_json::to_value(body)? {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    };
    map.insert("config_hash".into(), Value::String(info.config_hash.clone()));
    map.insert("seed".into(), Value::from(info.seed));
    Ok(Value::Object(map))
}

pub fn json_text<T: Serialize>(body: &T, info: &RunInfo) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&with_provenance(body, info)?)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, body: &T, info: &RunInfo) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(json_text(body, info)?.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Write a JSON document to `path`, or to stdout when `path` is `None`.
pub fn emit_json<T: Serialize>(path: Option<&Path>, body: &T, info: &RunInfo) -> Result<()> {
    match path {
        Some(p) => write_json(p, body, info),
        None => {
            print!("{}", json_text(body, info)?);
            Ok(())
        }
    }
}

/// Write a matrix: CSV with the provenance comment, or `GMX1` binary plus a
/// provenance sidecar for `.bin`/`.gmx` paths.
pub fn write_matrix(path: &Path, m: &DenseMatrix, info: &RunInfo) -> Result<()> {
    let mut w = create(path)?;
    if is_binary(path) {
        write_binary(m, &mut w)?;
        w.flush()?;
        let meta = serde_json::json!({ "rows": m.rows(), "cols": m.cols() });
        write_json(&sidecar_path(path), &meta, info)?;
    } else {
        writeln!(w, "{}", info.csv_comment())?;
        write_csv(m, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Write a matrix whose entries are all integers (adjacency and Hadamard
/// matrices) in compact CSV form; binary paths fall back to
/// [`write_matrix`].
pub fn write_integer_matrix<W: Write>(m: &DenseMatrix, mut out: W, comment: Option<&str>) -> Result<()> {
    if let Some(c) = comment {
        writeln!(out, "{c}")?;
    }
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{}", *v as i64));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_integer_matrix_file(path: &Path, m: &DenseMatrix, info: &RunInfo) -> Result<()> {
    if is_binary(path) {
        return write_matrix(path, m, info);
    }
    let mut w = create(path)?;
    write_integer_matrix(m, &mut w, Some(&info.csv_comment()))?;
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    if !path.exists() {
        return Err(CliError::validation(format!("{}: no such file", path.display())));
    }
    matrixkit::io::read_matrix(path).map_err(|e| match e {
        matrixkit::MatrixError::Io(io) => CliError::runtime(format!("{}: {io}", path.display())),
        other => CliError::validation(format!("{}: {other}", path.display())),
    })
}
