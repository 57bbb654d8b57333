//! Serialization of benchmark records and profile curves.
//!
//! CSV columns follow [`BenchRecord`] field order exactly; an empty record
//! list still yields the header row. JSON output is a stable-key array
//! (struct declaration order). Floats print as shortest round-trip
//! decimals in both formats, so emitted files are deterministic and
//! re-reading them reproduces the exact values.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::profile::{ProfileCurve, ProfilePoint};
use crate::record::BenchRecord;

/// Emission and parsing failures.
#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// On-disk formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (try csv or json)")),
        }
    }
}

impl Format {
    /// Picks the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

// ---------------------------------------------------------------- records

pub fn write_records<W: Write>(out: W, records: &[BenchRecord], format: Format) -> Result<(), EmitError> {
    match format {
        Format::Csv => write_records_csv(out, records),
        Format::Json => write_records_json(out, records),
    }
}

pub fn write_records_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<(), EmitError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(BenchRecord::FIELDS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_json<W: Write>(out: W, records: &[BenchRecord]) -> Result<(), EmitError> {
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn read_records<R: Read>(input: R, format: Format) -> Result<Vec<BenchRecord>, EmitError> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            let mut out = Vec::new();
            for row in r.deserialize() {
                out.push(row?);
            }
            Ok(out)
        }
        Format::Json => Ok(serde_json::from_reader(input)?),
    }
}

/// Writes records to a path, choosing CSV or JSON as asked.
pub fn write_records_file(path: &Path, records: &[BenchRecord], format: Format) -> Result<(), EmitError> {
    write_records(File::create(path)?, records, format)
}

/// Reads records from a path, inferring the format from the extension.
pub fn read_records_file(path: &Path) -> Result<Vec<BenchRecord>, EmitError> {
    read_records(File::open(path)?, Format::from_path(path))
}

// ----------------------------------------------------------------- curves

/// Flat row form of one curve sample, for CSV.
#[derive(Debug, serde::Serialize, serde::Deserialize)]
struct CurveRow {
    solver_id: String,
    tau: f64,
    pi: f64,
}

pub fn write_curves<W: Write>(out: W, curves: &[ProfileCurve], format: Format) -> Result<(), EmitError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for curve in curves {
                for pt in &curve.points {
                    w.serialize(CurveRow {
                        solver_id: curve.solver_id.clone(),
                        tau: pt.tau,
                        pi: pt.pi,
                    })?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, curves)?;
            out.write_all(b"\n")?;
            Ok(())
        }
    }
}

pub fn read_curves<R: Read>(input: R, format: Format) -> Result<Vec<ProfileCurve>, EmitError> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(input);
            let mut curves: Vec<ProfileCurve> = Vec::new();
            for row in r.deserialize() {
                let row: CurveRow = row?;
                match curves.last_mut() {
                    Some(last) if last.solver_id == row.solver_id => {
                        last.points.push(ProfilePoint {
                            tau: row.tau,
                            pi: row.pi,
                        });
                    }
                    _ => curves.push(ProfileCurve {
                        solver_id: row.solver_id,
                        points: vec![ProfilePoint {
                            tau: row.tau,
                            pi: row.pi,
                        }],
                    }),
                }
            }
            Ok(curves)
        }
        Format::Json => Ok(serde_json::from_reader(input)?),
    }
}

pub fn write_curves_file(path: &Path, curves: &[ProfileCurve], format: Format) -> Result<(), EmitError> {
    write_curves(File::create(path)?, curves, format)
}
