//! Delimited edge-list ingestion.
//!
//! One event per line, `src dst time [weight]` in configurable columns.
//! Lines starting with `#` and blank lines are skipped. Lines that lack a
//! required column, have an empty node token or carry an unusable weight are
//! counted as malformed and skipped; a time value that is not an integer
//! aborts ingestion with the offending line number.

use std::io::BufRead;
use std::str::FromStr;

use tcomm_core::{TemporalGraph, TemporalGraphBuilder};

use crate::error::{Error, Result};

/// Where each field lives on a line (0-based column indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Columns {
    pub src: usize,
    pub dst: usize,
    pub time: usize,
    pub weight: Option<usize>,
}

impl Default for Columns {
    fn default() -> Self {
        Self {
            src: 0,
            dst: 1,
            time: 2,
            weight: None,
        }
    }
}

impl FromStr for Columns {
    type Err = Error;

    /// `"0,1,2"` or `"0,1,2,3"` (src, dst, time, optional weight).
    fn from_str(s: &str) -> Result<Self> {
        let idx: Vec<usize> = s
            .split(',')
            .map(|c| {
                c.trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad column index {c:?}")))
            })
            .collect::<Result<_>>()?;
        match idx[..] {
            [src, dst, time] => Ok(Self {
                src,
                dst,
                time,
                weight: None,
            }),
            [src, dst, time, w] => Ok(Self {
                src,
                dst,
                time,
                weight: Some(w),
            }),
            _ => Err(Error::Invalid(format!(
                "expected src,dst,time[,weight], got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestFormat {
    /// Field separator. Whitespace separators treat runs as one.
    pub delimiter: char,
    pub columns: Columns,
    /// Skip the first non-comment line.
    pub header: bool,
}

impl Default for IngestFormat {
    fn default() -> Self {
        Self {
            delimiter: ' ',
            columns: Columns::default(),
            header: false,
        }
    }
}

/// What happened while reading the stream.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub lines: usize,
    pub events: usize,
    pub comments: usize,
    pub malformed: usize,
    /// line numbers (1-based) of the first malformed lines
    pub malformed_lines: Vec<usize>,
}

const KEEP_MALFORMED: usize = 20;

impl IngestReport {
    fn malformed(&mut self, line: usize) {
        self.malformed += 1;
        if self.malformed_lines.len() < KEEP_MALFORMED {
            self.malformed_lines.push(line);
        }
    }
}

/// Reads every event from `source` and builds the time-sorted graph.
pub fn ingest_events(
    source: impl BufRead,
    format: &IngestFormat,
) -> Result<(TemporalGraph, IngestReport)> {
    let mut builder = TemporalGraphBuilder::new();
    let mut report = IngestReport::default();
    let mut header_pending = format.header;
    let cols = format.columns;
    let needed = cols
        .src
        .max(cols.dst)
        .max(cols.time)
        .max(cols.weight.unwrap_or(0))
        + 1;

    for (i, line) in source.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        report.lines += 1;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            report.comments += 1;
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }

        let mut fields: Vec<&str> = Vec::with_capacity(needed);
        if format.delimiter.is_whitespace() {
            fields.extend(
                line.split(|c: char| c == format.delimiter || c.is_whitespace())
                    .filter(|f| !f.is_empty()),
            );
        } else {
            fields.extend(line.split(format.delimiter).map(str::trim));
        }
        if fields.len() < needed {
            report.malformed(lineno);
            continue;
        }
        let (src, dst) = (fields[cols.src], fields[cols.dst]);
        if src.is_empty() || dst.is_empty() {
            report.malformed(lineno);
            continue;
        }
        let time: i64 = fields[cols.time].parse().map_err(|_| {
            Error::parse(
                lineno,
                format!("time {:?} is not an integer", fields[cols.time]),
            )
        })?;
        let weight = match cols.weight {
            None => None,
            Some(c) => match fields[c].parse::<f64>() {
                Ok(w) if w.is_finite() && w >= 0.0 => Some(w),
                _ => {
                    report.malformed(lineno);
                    continue;
                }
            },
        };
        builder.push(src, dst, time, weight)?;
        report.events += 1;
    }

    if builder.is_empty() {
        return Err(Error::NoEvents {
            malformed: report.malformed,
        });
    }
    Ok((builder.build(), report))
}

/// Parses `10d`, `12h`, `30m`, `45s` or a bare integer (timestamp units).
pub fn parse_duration(s: &str) -> Result<i64> {
    let s = s.trim();
    let (digits, unit) = match s.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => (&s[..i], c.to_ascii_lowercase()),
        _ => (s, 's'),
    };
    let scale: i64 = match unit {
        's' => 1,
        'm' => 60,
        'h' => 3_600,
        'd' => 86_400,
        'w' => 7 * 86_400,
        _ => return Err(Error::Invalid(format!("unknown duration unit in {s:?}"))),
    };
    let value: i64 = digits
        .trim()
        .parse()
        .map_err(|_| Error::Invalid(format!("bad duration {s:?}")))?;
    value
        .checked_mul(scale)
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Invalid(format!("duration {s:?} must be positive")))
}
