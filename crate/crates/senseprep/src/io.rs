//! CSV readers and writers for sensor tables.
//!
//! A table has a header row naming the nodes, optionally preceded by a
//! `timestamp` column of integers.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use senseprep_core::ingest::SensorDataset;
use senseprep_core::Matrix;

use crate::Error;

/// Reads a sensor table from a CSV file.
pub fn load_csv(path: &Path) -> Result<SensorDataset, Error> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_csv(file)
}

pub fn read_csv(reader: impl Read) -> Result<SensorDataset, Error> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let has_time = header.first().is_some_and(|h| h.eq_ignore_ascii_case("timestamp"));
    let node_ids: Vec<String> = header.iter().skip(usize::from(has_time)).cloned().collect();
    if node_ids.is_empty() {
        return Err(Error::Format("header names no sensor columns".into()));
    }
    let mut values = Vec::new();
    let mut stamps = Vec::new();
    let mut rows = 0;
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Format(format!(
                "row {row}: expected {} fields, found {}",
                header.len(),
                record.len()
            )));
        }
        let mut fields = record.iter();
        if has_time {
            let raw = fields.next().unwrap_or_default();
            stamps.push(raw.parse::<i64>().map_err(|_| Error::Cell {
                row,
                column: header[0].clone(),
                value: raw.to_string(),
            })?);
        }
        for (raw, id) in fields.zip(&node_ids) {
            let v = raw.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Cell {
                row,
                column: id.clone(),
                value: raw.to_string(),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let matrix = Matrix::from_row_major(rows, node_ids.len(), values)?;
    Ok(SensorDataset::new(matrix, node_ids, has_time.then_some(stamps))?)
}

/// Writes a sensor table; floats use the shortest round-trip representation.
pub fn write_csv(path: &Path, data: &SensorDataset) -> Result<(), Error> {
    let mut buf = Vec::new();
    write_table(&mut buf, data)?;
    write_file(path, &buf)
}

pub fn write_table(out: &mut impl Write, data: &SensorDataset) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = Vec::new();
    if data.timestamps().is_some() {
        header.push("timestamp");
    }
    header.extend(data.node_ids().iter().map(String::as_str));
    w.write_record(&header)?;
    for i in 0..data.rows() {
        let mut rec: Vec<String> = Vec::with_capacity(header.len());
        if let Some(ts) = data.timestamps() {
            rec.push(ts[i].to_string());
        }
        rec.extend(data.row(i).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<buffer>".into(),
        source,
    })?;
    Ok(())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
