//! Raw per-replica rows and their CSV encoding.
//!
//! One schema for every experiment: `(n, l, replica, statistic,
//! parameters, value)`. Floats are written with 17 significant digits so
//! parsing a file back reproduces the exact f64s; lines end with a line
//! feed and fields are quoted only when needed.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad row: {0}")]
    BadRow(String),
}

/// One measured statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: i64,
    pub l: String,
    pub replica: u64,
    pub statistic: String,
    pub parameters: String,
    pub value: f64,
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Streams rows out as they are produced, flushing at batch boundaries so
/// an interrupted run still leaves a parseable prefix on disk.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(w: W) -> Result<Self, CsvError> {
        let mut writer = csv::WriterBuilder::new().from_writer(w);
        writer.write_record(["n", "l", "replica", "statistic", "parameters", "value"])?;
        Ok(CsvSink { writer })
    }

    pub fn push(&mut self, row: &Row) -> Result<(), CsvError> {
        self.writer.write_record([
            row.n.to_string().as_str(),
            &row.l,
            row.replica.to_string().as_str(),
            &row.statistic,
            &row.parameters,
            &fmt_float(row.value),
        ])?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), CsvError> {
        self.writer.flush()?;
        Ok(())
    }
}

pub fn emit_csv<W: Write>(rows: &[Row], w: W) -> Result<(), CsvError> {
    let mut sink = CsvSink::new(w)?;
    for row in rows {
        sink.push(row)?;
    }
    sink.flush()
}

pub fn parse_csv<R: Read>(r: R) -> Result<Vec<Row>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(r);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() != 6 {
            return Err(CsvError::BadRow(format!("{record:?}")));
        }
        let field = |i: usize| record.get(i).unwrap();
        rows.push(Row {
            n: field(0).parse().map_err(|e| CsvError::BadRow(format!("n: {e}")))?,
            l: field(1).to_string(),
            replica: field(2).parse().map_err(|e| CsvError::BadRow(format!("replica: {e}")))?,
            statistic: field(3).to_string(),
            parameters: field(4).to_string(),
            value: field(5).parse().map_err(|e| CsvError::BadRow(format!("value: {e}")))?,
        });
    }
    Ok(rows)
}

/// Reads `k=v;k=v` parameter strings.
pub fn parse_parameters(s: &str) -> Vec<(String, f64)> {
    s.split(';')
        .filter(|kv| !kv.is_empty())
        .filter_map(|kv| {
            let (k, v) = kv.split_once('=')?;
            Some((k.to_string(), v.parse().ok()?))
        })
        .collect()
}
