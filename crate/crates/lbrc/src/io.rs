//! CSV ingestion and serialization of datasets, curves and reports.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use lbrc_core::data::{Dataset, LbrcObservation};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Which time column accompanies `a` and `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeColumn {
    /// Residual time `v`.
    Residual,
    /// Total time `y = a + v`.
    Total,
}

/// Accepted input layout. The time column is detected from the header
/// unless fixed here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CsvRecordSpec {
    pub time_column: Option<TimeColumn>,
    /// Accept `a = 0`, i.e. subjects observed from time origin. Off by
    /// default because length-biased data always has `a > 0`.
    pub allow_zero_truncation: bool,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_dataset(path: &Path, spec: &CsvRecordSpec) -> Result<Dataset, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_dataset_from_reader(file, spec)
}

pub fn parse_dataset_from_reader<R: Read>(reader: R, spec: &CsvRecordSpec) -> Result<Dataset, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| CliError::input(format!("cannot read header: {e}")))?.clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(CliError::input("no observations"));
    }
    let col = |name: &str| headers.iter().position(|h| h == name);
    let a_col = col("a").ok_or_else(|| CliError::input("missing column a"))?;
    let d_col = col("delta").ok_or_else(|| CliError::input("missing column delta"))?;
    let (kind, t_col) = match (spec.time_column, col("v"), col("y")) {
        (Some(TimeColumn::Residual), Some(i), _) | (None, Some(i), None) => (TimeColumn::Residual, i),
        (Some(TimeColumn::Total), _, Some(i)) | (None, None, Some(i)) => (TimeColumn::Total, i),
        (None, Some(_), Some(_)) => return Err(CliError::input("header has both v and y columns; expected one")),
        (Some(TimeColumn::Residual), None, _) => return Err(CliError::input("missing column v")),
        _ => return Err(CliError::input("missing column v or y")),
    };
    let t_name = if kind == TimeColumn::Residual { "v" } else { "y" };

    let mut obs = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| CliError::input(format!("row {row}: {e}")))?;
        let field = |i: usize, name: &str| {
            rec.get(i).ok_or_else(|| CliError::input(format!("row {row}, column {name}: missing value")))
        };
        let number = |i: usize, name: &str| -> Result<f64, CliError> {
            let s = field(i, name)?;
            let x: f64 =
                s.parse().map_err(|_| CliError::input(format!("row {row}, column {name}: cannot parse {s:?}")))?;
            if !x.is_finite() {
                return Err(CliError::input(format!("row {row}, column {name}: value must be finite")));
            }
            Ok(x)
        };
        let a = number(a_col, "a")?;
        let t = number(t_col, t_name)?;
        let delta = match field(d_col, "delta")? {
            "0" => false,
            "1" => true,
            s => return Err(CliError::input(format!("row {row}, column delta: expected 0 or 1, got {s:?}"))),
        };
        if a < 0.0 || (a == 0.0 && !spec.allow_zero_truncation) {
            return Err(CliError::input(format!("row {row}, column a: truncation time must be > 0, got {a}")));
        }
        let o = match kind {
            TimeColumn::Residual => {
                if t < 0.0 {
                    return Err(CliError::input(format!("row {row}, column v: residual time must be >= 0")));
                }
                LbrcObservation::new(a, t, delta)
            }
            TimeColumn::Total => {
                if t < a {
                    return Err(CliError::input(format!("row {row}, column y: total time must be >= a")));
                }
                LbrcObservation::from_total(a, t, delta)
            }
        };
        obs.push(o.map_err(|e| CliError::input(format!("row {row}: {e}")))?);
    }
    if obs.is_empty() {
        return Err(CliError::input("no observations"));
    }
    Dataset::new(obs).map_err(CliError::from)
}

/// Writes `d` in the `a,v,delta` schema.
pub fn write_dataset<W: Write>(out: W, d: &Dataset) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "a,v,delta")?;
    for o in d.iter() {
        writeln!(w, "{},{},{}", fmt_num(o.a()), fmt_num(o.v()), o.delta() as u8)?;
    }
    w.flush()
}

pub fn sha256_hex(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// A fitted curve as `(t, value)` rows with `#` metadata lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveExport {
    pub estimator: String,
    pub n: usize,
    pub config_hash: String,
    pub rows: Vec<(f64, f64)>,
}

impl CurveExport {
    pub fn write<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "# estimator: {}", self.estimator)?;
        writeln!(w, "# n: {}", self.n)?;
        writeln!(w, "# config: {}", self.config_hash)?;
        writeln!(w, "t,value")?;
        for &(t, v) in &self.rows {
            writeln!(w, "{},{}", fmt_num(t), fmt_num(v))?;
        }
        w.flush()
    }

    /// Reads back a file written by [`CurveExport::write`].
    pub fn read<R: Read>(input: R) -> Result<Self, CliError> {
        let mut text = String::new();
        std::io::BufReader::new(input)
            .read_to_string(&mut text)
            .map_err(|e| CliError::input(format!("cannot read curve: {e}")))?;
        let mut estimator = String::new();
        let mut n = 0;
        let mut config_hash = String::new();
        let mut rows = Vec::new();
        for (k, line) in text.lines().enumerate() {
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((key, val)) = meta.split_once(':') {
                    match key.trim() {
                        "estimator" => estimator = val.trim().to_string(),
                        "n" => n = val.trim().parse().map_err(|_| CliError::input("curve: bad n"))?,
                        "config" => config_hash = val.trim().to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            if line == "t,value" || line.is_empty() {
                continue;
            }
            let bad = || CliError::input(format!("curve line {}: expected t,value", k + 1));
            let (t, v) = line.split_once(',').ok_or_else(bad)?;
            rows.push((t.parse().map_err(|_| bad())?, v.parse().map_err(|_| bad())?));
        }
        Ok(Self { estimator, n, config_hash, rows })
    }
}
