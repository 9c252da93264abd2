use std::path::Path;

use csv::{ReaderBuilder, Trim};

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;

use super::{read_bytes, write_bytes};

/// Parses a rectangular numeric grid: comma-separated fields, one row per
/// line, lines starting with `#` ignored.
///
/// Ragged rows, non-numeric or non-finite fields and empty input are errors
/// carrying the 1-based line and column.
pub fn parse_matrix_csv(bytes: &[u8]) -> Result<ImageMatrix> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(Trim::All)
        .flexible(true)
        .from_reader(bytes);

    let mut cols = 0usize;
    let mut rows = 0usize;
    let mut data = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(Error::Csv {
                    line,
                    column: 0,
                    message: e.to_string(),
                });
            }
        }
        let line = record.position().map_or(0, |p| p.line());
        if rows == 0 {
            cols = record.len();
        } else if record.len() != cols {
            return Err(Error::Csv {
                line,
                column: record.len().min(cols) + 1,
                message: format!("ragged row: {} fields, expected {cols}", record.len()),
            });
        }
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Csv {
                line,
                column: k + 1,
                message: format!("not a number: `{field}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    line,
                    column: k + 1,
                    message: format!("non-finite value `{field}`"),
                });
            }
            data.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Csv {
            line: 1,
            column: 0,
            message: "empty file".into(),
        });
    }
    ImageMatrix::new(rows, cols, data)
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<ImageMatrix> {
    let path = path.as_ref();
    parse_matrix_csv(&read_bytes(path)?).map_err(|e| Error::in_file(path, e))
}

/// Shortest round-trip decimal for every entry, so parsing the output
/// reproduces the matrix bit for bit.
pub fn format_matrix_csv(m: &ImageMatrix) -> String {
    let mut buf = ryu::Buffer::new();
    let mut out = String::with_capacity(m.len() * 8);
    for i in 0..m.rows() {
        for (j, &v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(buf.format_finite(v));
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(m: &ImageMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), format_matrix_csv(m).as_bytes())
}
