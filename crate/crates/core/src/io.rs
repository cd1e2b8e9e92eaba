// SPDX-License-Identifier: Apache-2.0

//! Point and prediction files.
//!
//! Point files are CSV with a `x,y,z` header, or a layout dump (detected by
//! its magic). Query files are CSV with at least `x` and `y` columns; any
//! other column is ignored.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{IdwError, Result};
use crate::layout::{read_dump, DUMP_MAGIC};
use crate::model::{PointRecord, QueryPoint};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| IdwError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> IdwError {
    match e.kind() {
        csv::ErrorKind::Io(_) => {
            let msg = e.to_string();
            match e.into_kind() {
                csv::ErrorKind::Io(io) => IdwError::io(path, io),
                _ => IdwError::Format(msg),
            }
        }
        _ => IdwError::Format(format!("{}: {e}", path.display())),
    }
}

pub fn parse_points_csv<R: Read>(reader: R, origin: &Path) -> Result<Vec<PointRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    for col in ["x", "y", "z"] {
        if !headers.iter().any(|h| h == col) {
            return Err(IdwError::Format(format!(
                "{}: missing `{col}` column",
                origin.display()
            )));
        }
    }
    let records = rdr
        .deserialize::<PointRecord>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| csv_error(origin, e))?;
    if records.iter().any(|r| !r.is_finite()) {
        return Err(IdwError::InvalidCoordinate);
    }
    Ok(records)
}

/// Reads samples from a CSV file or a layout dump.
pub fn read_points(path: impl AsRef<Path>) -> Result<Vec<PointRecord>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes).map_err(|e| IdwError::io(path, e))?;
    if bytes.starts_with(&DUMP_MAGIC) {
        return Ok(read_dump(bytes.as_slice())?.to_records());
    }
    parse_points_csv(bytes.as_slice(), path)
}

pub fn read_queries(path: impl AsRef<Path>) -> Result<Vec<QueryPoint>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(open(path)?);
    let queries = rdr
        .deserialize::<QueryPoint>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| csv_error(path, e))?;
    if queries.iter().any(|q| !q.is_finite()) {
        return Err(IdwError::InvalidCoordinate);
    }
    Ok(queries)
}

/// Writes `x,y,z` rows. Values are printed in shortest round-trip form, so
/// reading the file back reproduces them exactly.
pub fn write_points_csv<W: Write>(records: &[PointRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,y,z")?;
    for r in records {
        writeln!(w, "{},{},{}", r.x, r.y, r.z)?;
    }
    w.flush()
}

pub fn write_predictions_csv<W: Write>(queries: &[QueryPoint], values: &[f64], mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,y,z_pred")?;
    for (q, v) in queries.iter().zip(values) {
        writeln!(w, "{},{},{}", q.x, q.y, v)?;
    }
    w.flush()
}

/// Creates `path` and hands a buffered writer to `f`, attaching the path to
/// any I/O error.
pub fn write_file<F>(path: impl AsRef<Path>, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| IdwError::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(|e| IdwError::io(path, e))
}
