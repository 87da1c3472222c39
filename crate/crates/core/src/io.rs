//! CSV series format: header `t,y` (optionally `t,y,mask`), one sample per
//! row. LF or CRLF accepted on read, LF written.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Reads a series, ignoring a trailing `mask` column if present.
pub fn read_series<R: Read>(reader: R) -> Result<TimeSeries> {
    read_series_with_mask(reader).map(|(s, _)| s)
}

/// Reads a series and its optional `mask` column.
pub fn read_series_with_mask<R: Read>(reader: R) -> Result<(TimeSeries, Option<Vec<bool>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let has_mask = match names.as_slice() {
        ["t", "y"] => false,
        ["t", "y", "mask"] => true,
        _ => {
            return Err(Error::Parse(format!(
                "expected header `t,y` or `t,y,mask`, found `{}`",
                names.join(",")
            )))
        }
    };

    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut mask = has_mask.then(Vec::new);
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = row + 2;
        times.push(parse_field(&record, 0, line)?);
        values.push(parse_field(&record, 1, line)?);
        if let Some(mask) = mask.as_mut() {
            let flag = match record.get(2) {
                Some("0") => false,
                Some("1") => true,
                other => {
                    return Err(Error::Parse(format!(
                        "line {line}: mask must be 0 or 1, found {other:?}"
                    )))
                }
            };
            mask.push(flag);
        }
    }
    Ok((TimeSeries::new(times, values)?, mask))
}

fn parse_field(record: &csv::StringRecord, idx: usize, line: usize) -> Result<f64> {
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::Parse(format!("line {line}: missing column {}", idx + 1)))?;
    raw.parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: `{raw}` is not a number")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Writes `t,y` rows, or `t,y,mask` when a mask is given.
pub fn write_series<W: Write>(writer: W, series: &TimeSeries, mask: Option<&[bool]>) -> Result<()> {
    if let Some(m) = mask {
        if m.len() != series.len() {
            return Err(Error::invalid("mask length differs from series length"));
        }
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let row_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    if mask.is_some() {
        w.write_record(["t", "y", "mask"]).map_err(row_err)?;
    } else {
        w.write_record(["t", "y"]).map_err(row_err)?;
    }
    for (i, (t, y)) in series.times().iter().zip(series.values()).enumerate() {
        let t = t.to_string();
        let y = y.to_string();
        match mask {
            Some(m) => w
                .write_record([t.as_str(), y.as_str(), if m[i] { "1" } else { "0" }])
                .map_err(row_err)?,
            None => w.write_record([t.as_str(), y.as_str()]).map_err(row_err)?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_series_file(path: impl AsRef<Path>) -> Result<TimeSeries> {
    read_series(std::fs::File::open(path)?)
}

pub fn write_series_file(
    path: impl AsRef<Path>,
    series: &TimeSeries,
    mask: Option<&[bool]>,
) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_series(std::io::BufWriter::new(file), series, mask)
}
