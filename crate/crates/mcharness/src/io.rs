//! Result files.
//!
//! CSV: a `#` provenance line (`config_hash`, `seed`), then the header
//! `n,rho,kappa,mean_latent,mean_subspace,stderr_latent,stderr_subspace,setting,trials,failures`.
//! Reals are written with 17 significant digits (`{:.16e}`), so every `f64`
//! round-trips exactly. JSON carries the same fields (see
//! `schemas/results.schema.json`).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::experiment::{ResultRow, TaggedRecord};
use crate::{McError, Result};

pub const RESULT_COLUMNS: [&str; 10] =
    ["n", "rho", "kappa", "mean_latent", "mean_subspace", "stderr_latent", "stderr_subspace", "setting", "trials", "failures"];

pub const TRIAL_COLUMNS: [&str; 7] = ["setting", "n", "rho", "kappa", "trial_index", "latent_error", "subspace_error"];

/// Output format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = McError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(McError::InvalidConfig(format!("unknown format {other:?} (expected csv or json)"))),
        }
    }
}

/// Provenance written into every result file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

/// Parsed results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub provenance: Option<Provenance>,
    pub rows: Vec<ResultRow>,
}

/// 17 significant digits.
pub fn format_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

fn provenance_line(p: &Provenance) -> String {
    format!("# config_hash={} seed={}\n", p.config_hash, p.seed)
}

fn csv_error(e: csv::Error) -> McError {
    McError::Io(std::io::Error::other(e.to_string()))
}

/// Write rows as CSV or JSON.
pub fn emit_results<W: Write>(rows: &[ResultRow], format: Format, provenance: &Provenance, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            out.write_all(provenance_line(provenance).as_bytes())?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(RESULT_COLUMNS).map_err(csv_error)?;
            for r in rows {
                w.write_record([
                    r.n.to_string(),
                    format_real(r.rho),
                    format_real(r.kappa),
                    format_real(r.mean_latent),
                    format_real(r.mean_subspace),
                    format_real(r.stderr_latent),
                    format_real(r.stderr_subspace),
                    r.setting.clone(),
                    r.trials.to_string(),
                    r.failures.to_string(),
                ])
                .map_err(csv_error)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let doc = ResultsFile { provenance: Some(provenance.clone()), rows: rows.to_vec() };
            serde_json::to_writer_pretty(&mut out, &doc)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Write per-trial records as CSV.
pub fn emit_trials<W: Write>(records: &[TaggedRecord], provenance: &Provenance, mut out: W) -> Result<()> {
    out.write_all(provenance_line(provenance).as_bytes())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_COLUMNS).map_err(csv_error)?;
    for t in records {
        let r = &t.record;
        w.write_record([
            t.setting.clone(),
            r.n.to_string(),
            format_real(r.rho),
            format_real(r.kappa),
            r.trial_index.to_string(),
            format_real(r.latent_error),
            format_real(r.subspace_error),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_provenance(text: &str) -> Option<Provenance> {
    let line = text.lines().next()?.strip_prefix('#')?;
    let mut hash = None;
    let mut seed = None;
    for field in line.split_whitespace() {
        if let Some(v) = field.strip_prefix("config_hash=") {
            hash = Some(v.to_string());
        } else if let Some(v) = field.strip_prefix("seed=") {
            seed = v.parse().ok();
        }
    }
    Some(Provenance { config_hash: hash?, seed: seed? })
}

/// Parse a results CSV; malformed input is reported with its 1-based line.
pub fn read_results_csv<R: Read>(mut input: R) -> Result<ResultsFile> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let provenance = parse_provenance(&text);
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| McError::Parse { line: 1, message: e.to_string() })?.clone();
    let header_line = text.lines().position(|l| !l.starts_with('#')).unwrap_or(0) + 1;
    if headers.iter().collect::<Vec<_>>() != RESULT_COLUMNS {
        return Err(McError::Parse { line: header_line, message: format!("expected header {}", RESULT_COLUMNS.join(",")) });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            McError::Parse { line, message: e.to_string() }
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |k: usize| record.get(k).unwrap_or("");
        let real = |k: usize| {
            field(k).trim().parse::<f64>().map_err(|_| McError::Parse {
                line,
                message: format!("column {} = {:?} is not a number", RESULT_COLUMNS[k], field(k)),
            })
        };
        let count = |k: usize| {
            field(k).trim().parse::<usize>().map_err(|_| McError::Parse {
                line,
                message: format!("column {} = {:?} is not a count", RESULT_COLUMNS[k], field(k)),
            })
        };
        rows.push(ResultRow {
            n: count(0)?,
            rho: real(1)?,
            kappa: real(2)?,
            mean_latent: real(3)?,
            mean_subspace: real(4)?,
            stderr_latent: real(5)?,
            stderr_subspace: real(6)?,
            setting: field(7).to_string(),
            trials: count(8)?,
            failures: count(9)?,
        });
    }
    Ok(ResultsFile { provenance, rows })
}

/// Parse a results JSON document.
pub fn read_results_json<R: Read>(input: R) -> Result<ResultsFile> {
    Ok(serde_json::from_reader(input)?)
}
