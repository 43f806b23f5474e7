//! CSV input/output for sample matrices and JSON helpers.
//!
//! CSV: one observation per row, one variable per column, comma delimited,
//! decimal point only. Values are written with 17 significant digits so a
//! round trip is exact. JSON has no representation for infinities, so
//! non-finite reals are written as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::SampleMatrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsvOptions {
    /// Skip the first line.
    pub header: bool,
}

/// Parses CSV text. Errors name the 1-based row and column of the offending
/// cell; rows are counted from the start of the input, header included.
pub fn read_csv<R: BufRead>(reader: R, opts: CsvOptions) -> Result<SampleMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let row_no = idx + 1;
        if idx == 0 && opts.header {
            continue;
        }
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut values = Vec::with_capacity(width.unwrap_or(8));
        for (cidx, cell) in line.split(',').enumerate() {
            let cell = cell.trim();
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row: row_no,
                column: cidx + 1,
                message: if cell.is_empty() { "empty cell".into() } else { format!("not a number: '{cell}'") },
            })?;
            if !v.is_finite() {
                return Err(Error::Parse { row: row_no, column: cidx + 1, message: format!("non-finite value '{cell}'") });
            }
            values.push(v);
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(Error::Parse {
                    row: row_no,
                    column: values.len().min(w) + 1,
                    message: format!("expected {w} columns, found {}", values.len()),
                })
            }
            Some(_) => {}
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(Error::Parse { row: 1, column: 1, message: "no data rows".into() });
    }
    SampleMatrix::from_rows(&rows)
}

pub fn read_csv_file(path: &Path, opts: CsvOptions) -> Result<SampleMatrix<f64>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
    read_csv(std::io::BufReader::new(file), opts)
}

pub fn write_csv<W: Write>(mut w: W, m: &SampleMatrix<f64>) -> Result<()> {
    let mut line = String::new();
    for r in 0..m.n() {
        line.clear();
        for c in 0..m.p() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&format_real(m.get(r, c)));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Seventeen significant digits, scientific notation.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn encode(v: f64) -> ExtReal {
    if v.is_finite() {
        ExtReal::Num(v)
    } else if v.is_nan() {
        ExtReal::Tag("nan".into())
    } else if v > 0.0 {
        ExtReal::Tag("inf".into())
    } else {
        ExtReal::Tag("-inf".into())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtReal {
    Num(f64),
    Tag(String),
}

impl ExtReal {
    fn decode<E: serde::de::Error>(self) -> std::result::Result<f64, E> {
        match self {
            ExtReal::Num(v) => Ok(v),
            ExtReal::Tag(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("expected a number or inf/-inf/nan, got '{other}'"))),
            },
        }
    }
}

/// `#[serde(with = "ext_real")]` for a single `f64`.
pub mod ext_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        encode(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        ExtReal::deserialize(d)?.decode()
    }
}

/// `#[serde(with = "ext_real_vec")]` for `Vec<f64>`.
pub mod ext_real_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|x| encode(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
        Vec::<ExtReal>::deserialize(d)?.into_iter().map(ExtReal::decode).collect()
    }
}

/// A real as a JSON value, with the string encoding for non-finite values.
pub fn ext_real_value(v: f64) -> serde_json::Value {
    match encode(v) {
        ExtReal::Num(x) => serde_json::Value::from(x),
        ExtReal::Tag(t) => serde_json::Value::String(t),
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
