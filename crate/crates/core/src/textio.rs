//! Plain-text serialization for measures and number literals.
//!
//! Numbers parse as decimal literals or as fractions like `7/16`, so dyadic
//! constants stay exact in config files. Output uses Rust's shortest
//! round-trip float formatting, which makes the discrete-measure round trip
//! bit-exact.

use thiserror::Error;

use crate::measures::{CoreMeasure, MeasureData, MeasureError};
use crate::Measure;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TextError {
    #[error("cannot parse number {0:?}")]
    BadNumber(String),
    #[error("malformed measure text: {0}")]
    BadFormat(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Parses `"0.25"`, `"1e-3"` or a fraction `"7/16"`.
pub fn parse_real(s: &str) -> Result<f64, TextError> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num
            .trim()
            .parse()
            .map_err(|_| TextError::BadNumber(s.to_string()))?;
        let den: f64 = den
            .trim()
            .parse()
            .map_err(|_| TextError::BadNumber(s.to_string()))?;
        if den == 0.0 {
            return Err(TextError::BadNumber(s.to_string()));
        }
        return Ok(num / den);
    }
    s.parse().map_err(|_| TextError::BadNumber(s.to_string()))
}

/// Lines: a `c` header, a variant header with the entry count, then one
/// entry per line (`position weight` for atoms, a density value per cell).
pub fn measure_to_text(m: &Measure) -> String {
    let mut out = String::new();
    out.push_str(&format!("c {}\n", m.c()));
    match m.data() {
        MeasureData::Discrete(atoms) => {
            out.push_str(&format!("discrete {}\n", atoms.len()));
            for &(p, w) in atoms {
                out.push_str(&format!("{p} {w}\n"));
            }
        }
        MeasureData::StepDensity(values) => {
            out.push_str(&format!("step-density {}\n", values.len()));
            for v in values {
                out.push_str(&format!("{v}\n"));
            }
        }
    }
    out.push_str(&format!("mass {}\n", m.total_mass()));
    out
}

pub fn measure_from_text(text: &str) -> Result<Measure, TextError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let c_line = lines
        .next()
        .ok_or_else(|| TextError::BadFormat("empty input".into()))?;
    let c = match c_line.strip_prefix("c ") {
        Some(rest) => parse_real(rest)?,
        None => return Err(TextError::BadFormat(format!("expected 'c <value>', got {c_line:?}"))),
    };
    let header = lines
        .next()
        .ok_or_else(|| TextError::BadFormat("missing variant header".into()))?;
    let (variant, count) = header
        .split_once(' ')
        .ok_or_else(|| TextError::BadFormat(format!("bad header {header:?}")))?;
    let count: usize = count
        .parse()
        .map_err(|_| TextError::BadFormat(format!("bad count in {header:?}")))?;
    match variant {
        "discrete" => {
            let mut atoms = Vec::with_capacity(count);
            for _ in 0..count {
                let line = lines
                    .next()
                    .ok_or_else(|| TextError::BadFormat("truncated atom list".into()))?;
                let (p, w) = line
                    .split_once(' ')
                    .ok_or_else(|| TextError::BadFormat(format!("bad atom line {line:?}")))?;
                atoms.push((parse_real(p)?, parse_real(w)?));
            }
            Ok(CoreMeasure::discrete(c, atoms)?)
        }
        "step-density" => {
            let mut values = Vec::with_capacity(count);
            for _ in 0..count {
                let line = lines
                    .next()
                    .ok_or_else(|| TextError::BadFormat("truncated density list".into()))?;
                values.push(parse_real(line)?);
            }
            Ok(CoreMeasure::step_density(c, values)?)
        }
        other => Err(TextError::BadFormat(format!("unknown variant {other:?}"))),
    }
}
