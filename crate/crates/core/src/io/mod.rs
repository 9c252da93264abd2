//! On-disk formats: matrices as CSV or PGM, frame directories, sparsity
//! series as CSV, experiment reports as JSON.
//!
//! The `parse_*`/`decode_*` functions work on in-memory bytes and are the
//! entry points exercised by the fuzz targets; the `read_*` functions add
//! path handling on top.

mod frames;
mod matrix_csv;
mod pgm;
mod series;

pub use frames::{read_frame, read_frame_dir, FrameDir, FrameFile};
pub use matrix_csv::{format_matrix_csv, parse_matrix_csv, read_matrix_csv, write_matrix_csv};
pub use pgm::{decode_pgm, encode_pgm_p5, read_pgm, write_pgm};
pub use series::{
    format_series_csv, parse_series_csv, write_plot_csv, write_report_json, write_series_csv, SeriesRecord,
    SERIES_HEADER,
};

use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}
