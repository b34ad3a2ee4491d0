//! File formats: Timeline JSON and AU CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::types::{validate_timeline, AuFrame, AuSeries, CoreError, Timeline};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("timeline JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] CoreError),
    #[error("AU CSV header must start with `t,au14`, got `{0}`")]
    BadHeader(String),
    #[error("AU CSV line {line}: {msg}")]
    BadRow { line: usize, msg: String },
}

pub fn timeline_from_json(text: &str) -> Result<Timeline, FormatError> {
    let tl: Timeline = serde_json::from_str(text)?;
    Ok(validate_timeline(tl)?)
}

pub fn timeline_to_json(tl: &Timeline) -> String {
    serde_json::to_string_pretty(tl).expect("timeline serializes")
}

/// Rows whose AU14 value had to be clamped into range during ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampWarning {
    pub line: usize,
    pub original: f64,
}

/// Parses an AU CSV (`t,au14[,auNN...]`). Out-of-range AU14 values are clamped
/// and reported; bad numbers and non-increasing times are errors.
pub fn read_au_csv(text: &str) -> Result<(AuSeries, Vec<ClampWarning>), FormatError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l.trim().trim_start_matches('\u{feff}'),
            None => return Err(FormatError::BadHeader(String::new())),
        }
    };
    let cols: Vec<String> = header.split(',').map(|c| c.trim().to_ascii_lowercase()).collect();
    if cols.len() < 2 || cols[0] != "t" || cols[1] != "au14" {
        return Err(FormatError::BadHeader(header.to_string()));
    }

    let mut series = AuSeries::default();
    let mut warnings = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(FormatError::BadRow {
                line,
                msg: format!("expected {} fields, got {}", cols.len(), fields.len()),
            });
        }
        let mut nums = Vec::with_capacity(fields.len());
        for f in &fields {
            let v: f64 = f.parse().map_err(|_| FormatError::BadRow {
                line,
                msg: format!("not a number: `{f}`"),
            })?;
            if !v.is_finite() {
                return Err(FormatError::BadRow {
                    line,
                    msg: format!("non-finite value `{f}`"),
                });
            }
            nums.push(v);
        }
        let mut frame = AuFrame::new(nums[0], nums[1]);
        frame.aux = cols[2..].iter().cloned().zip(nums[2..].iter().copied()).collect::<BTreeMap<_, _>>();
        let original = frame.au14;
        if frame.clamp_intensity() {
            warnings.push(ClampWarning { line, original });
        }
        series.push(frame).map_err(|e| FormatError::BadRow {
            line,
            msg: e.to_string(),
        })?;
    }
    Ok((series, warnings))
}

pub fn write_au_csv(series: &AuSeries) -> String {
    let aux_cols: Vec<&String> = series
        .frames
        .first()
        .map(|f| f.aux.keys().collect())
        .unwrap_or_default();
    let mut out = String::from("t,au14");
    for c in &aux_cols {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for f in &series.frames {
        write!(out, "{},{}", f.t, f.au14).unwrap();
        for c in &aux_cols {
            write!(out, ",{}", f.aux.get(*c).copied().unwrap_or(0.0)).unwrap();
        }
        out.push('\n');
    }
    out
}
