//! CSV emission and parsing for run records.
//!
//! The header is fixed and mandatory. Floats are written through `Display`
//! (shortest round-trip form), booleans as `true`/`false`, and a missing
//! reference standard error as an empty field.

use std::io::Write;

use crate::runner::RunRecord;
use crate::{BenchError, Result};

/// The one and only column layout.
pub const CSV_HEADER: &str =
    "model,rep,estimator,estimate,truth,error,converged,n_mcmc,n_obs,seed,wall_ms,truth_se";

/// Writes the header and one line per record.
pub fn write_csv<W: Write>(mut w: W, records: &[RunRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let se = r.truth_se.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.rep,
            r.estimator,
            r.estimate,
            r.truth,
            r.error,
            r.converged,
            r.n_mcmc,
            r.n_obs,
            r.seed,
            r.wall_ms,
            se
        )?;
    }
    Ok(())
}

/// Renders records to an in-memory CSV string.
pub fn to_csv_string(records: &[RunRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

fn bad(line: usize, what: impl core::fmt::Display) -> BenchError {
    BenchError::Config(format!("CSV line {line}: {what}"))
}

fn field<'a>(parts: &[&'a str], idx: usize, line: usize) -> Result<&'a str> {
    parts
        .get(idx)
        .copied()
        .ok_or_else(|| bad(line, "missing field"))
}

fn parse_field<T: core::str::FromStr>(parts: &[&str], idx: usize, line: usize) -> Result<T> {
    let raw = field(parts, idx, line)?;
    raw.parse()
        .map_err(|_| bad(line, format!("cannot parse field {}: {raw:?}", idx + 1)))
}

/// Parses CSV text produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| BenchError::Config("empty CSV input".into()))?;
    if header.trim_end() != CSV_HEADER {
        return Err(BenchError::Config(format!(
            "unexpected CSV header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = raw.split(',').collect();
        if parts.len() != 12 {
            return Err(bad(line_no, format!("expected 12 fields, got {}", parts.len())));
        }
        let se_raw = parts[11].trim();
        let truth_se = if se_raw.is_empty() {
            None
        } else {
            Some(
                se_raw
                    .parse()
                    .map_err(|_| bad(line_no, format!("cannot parse truth_se {se_raw:?}")))?,
            )
        };
        out.push(RunRecord {
            model: field(&parts, 0, line_no)?.to_string(),
            rep: parse_field(&parts, 1, line_no)?,
            estimator: field(&parts, 2, line_no)?.to_string(),
            estimate: parse_field(&parts, 3, line_no)?,
            truth: parse_field(&parts, 4, line_no)?,
            error: parse_field(&parts, 5, line_no)?,
            converged: parse_field(&parts, 6, line_no)?,
            n_mcmc: parse_field(&parts, 7, line_no)?,
            n_obs: parse_field(&parts, 8, line_no)?,
            seed: parse_field(&parts, 9, line_no)?,
            wall_ms: parse_field(&parts, 10, line_no)?,
            truth_se,
        });
    }
    Ok(out)
}
