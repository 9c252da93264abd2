use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::BandRow;
use crate::stream::SparsityReading;

use super::write_bytes;

pub const SERIES_HEADER: &str = "t,h_raw,bias,g,g_unclamped,a_bar,a2_bar,sigma2";

/// Flat CSV row for one [`SparsityReading`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub t: i64,
    pub h_raw: f64,
    pub bias: f64,
    pub g: f64,
    pub g_unclamped: f64,
    pub a_bar: f64,
    pub a2_bar: f64,
    pub sigma2: f64,
}

impl From<&SparsityReading> for SeriesRecord {
    fn from(r: &SparsityReading) -> Self {
        Self {
            t: r.t,
            h_raw: r.h_raw,
            bias: r.bias,
            g: r.g,
            g_unclamped: r.g_unclamped,
            a_bar: r.moments.a_bar,
            a2_bar: r.moments.a2_bar,
            sigma2: r.moments.sigma2,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Csv {
        line,
        column: 0,
        message: e.to_string(),
    }
}

/// Header line plus one line per record; floats in shortest round-trip form.
pub fn format_series_csv(records: &[SeriesRecord]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(SERIES_HEADER.split(',')).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Serialize(e.to_string()))
}

pub fn write_series_csv(records: &[SeriesRecord], path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &format_series_csv(records)?)
}

/// Parses a series CSV; the header must match [`SERIES_HEADER`] exactly.
pub fn parse_series_csv(bytes: &[u8]) -> Result<Vec<SeriesRecord>> {
    let mut r = csv::ReaderBuilder::new().from_reader(bytes);
    let header = r.headers().map_err(csv_err)?;
    if header.iter().collect::<Vec<_>>().join(",") != SERIES_HEADER {
        return Err(Error::Csv {
            line: 1,
            column: 0,
            message: format!("expected header `{SERIES_HEADER}`"),
        });
    }
    r.deserialize().map(|rec| rec.map_err(csv_err)).collect()
}

/// Plot-ready sweep table with columns `x,m_eps,lo,hi`.
pub fn write_plot_csv(rows: &[BandRow], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "m_eps", "lo", "hi"]).map_err(csv_err)?;
    for row in rows {
        w.serialize((row.x, row.band.m_eps, row.band.lo, row.band.hi))
            .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    write_bytes(path.as_ref(), &bytes)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_report_json<T: Serialize>(report: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(report).map_err(|e| Error::Serialize(e.to_string()))?;
    bytes.push(b'\n');
    write_bytes(path.as_ref(), &bytes)
}
