//! Per-integer survey rows and their CSV form.
//!
//! Header: `n,eligible,rep_count,min_micro,sseries_add,sseries_mult`, LF line
//! endings, absent optionals as empty fields. `eligible` is the
//! three-square eligibility flag; the full tag set is recomputed from `n`
//! when a row is read back, and a row whose flag disagrees is rejected.
//! Lines starting with `#` are comments.

use std::io::{Read, Write};

use serde::Serialize;

use crate::arith::{classify, EligibilitySet};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 6] = ["n", "eligible", "rep_count", "min_micro", "sseries_add", "sseries_mult"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurveyRecord {
    pub n: u64,
    pub eligibility: EligibilitySet,
    pub rep_count: u64,
    pub min_micro: Option<u64>,
    pub sseries_add: Option<f64>,
    pub sseries_mult: Option<f64>,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

fn parse_opt<T: std::str::FromStr>(field: &str, name: &str, line: u64) -> Result<Option<T>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::InvalidArgument(format!("line {line}: bad {name} field {field:?}")))
}

/// Writes `#`-prefixed comment lines, the header and the rows.
pub fn write_records<W: Write>(mut out: W, comments: &[String], records: &[SurveyRecord]) -> Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.n.to_string(),
            r.eligibility.is_three_square_eligible().to_string(),
            r.rep_count.to_string(),
            opt(&r.min_micro),
            opt(&r.sseries_add),
            opt(&r.sseries_mult),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses rows written by [`write_records`], skipping comment lines.
pub fn read_records<R: Read>(input: R) -> Result<Vec<SurveyRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidArgument(format!("unexpected CSV header {header:?}")));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize| row.get(i).unwrap_or("");
        let n: u64 = field(0)
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("line {line}: bad n {:?}", field(0))))?;
        let eligible: bool = field(1)
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("line {line}: bad eligible flag {:?}", field(1))))?;
        let eligibility = classify(n);
        if eligibility.is_three_square_eligible() != eligible {
            return Err(Error::InvalidArgument(format!(
                "line {line}: eligible = {eligible} contradicts n = {n}"
            )));
        }
        let rep_count = field(2)
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("line {line}: bad rep_count {:?}", field(2))))?;
        out.push(SurveyRecord {
            n,
            eligibility,
            rep_count,
            min_micro: parse_opt(field(3), "min_micro", line)?,
            sseries_add: parse_opt(field(4), "sseries_add", line)?,
            sseries_mult: parse_opt(field(5), "sseries_mult", line)?,
        });
    }
    Ok(out)
}
