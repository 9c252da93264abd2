//! Netpbm graymap (PGM) decoding, plain `P2` and raw `P5`.
//!
//! Samples are returned as raw intensities; no rescaling by `maxval`.

use std::path::Path;

use crate::error::{Error, PgmError, Result};
use crate::matrix::ImageMatrix;

use super::{read_bytes, write_bytes};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    Plain,
    Raw,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next whitespace-delimited token, or `None` at end of input.
    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn header_number(&mut self) -> std::result::Result<u64, PgmError> {
        let tok = self.token().ok_or(PgmError::TruncatedHeader)?;
        parse_decimal(tok).ok_or_else(|| PgmError::BadHeaderField(String::from_utf8_lossy(tok).into_owned()))
    }
}

fn parse_decimal(tok: &[u8]) -> Option<u64> {
    if tok.is_empty() || !tok.iter().all(u8::is_ascii_digit) {
        return None;
    }
    tok.iter()
        .try_fold(0u64, |acc, &d| acc.checked_mul(10)?.checked_add(u64::from(d - b'0')))
}

/// Decodes a PGM image held in memory.
pub fn decode_pgm(data: &[u8]) -> std::result::Result<ImageMatrix, PgmError> {
    let variant = match data.get(..2) {
        Some(b"P2") => Variant::Plain,
        Some(b"P5") => Variant::Raw,
        _ => return Err(PgmError::BadMagic),
    };
    // magic must be followed by whitespace or a comment
    if !matches!(data.get(2), Some(b) if b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadMagic);
    }
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.header_number()?;
    let height = cur.header_number()?;
    let maxval = cur.header_number()?;
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension {
            width: width as usize,
            height: height as usize,
        });
    }
    if !(1..=65535).contains(&maxval) {
        return Err(PgmError::MaxvalOutOfRange(maxval));
    }
    let samples = usize::try_from(width)
        .ok()
        .zip(usize::try_from(height).ok())
        .and_then(|(w, h)| w.checked_mul(h))
        .ok_or_else(|| PgmError::BadHeaderField(format!("{width}x{height}")))?;

    let values = match variant {
        Variant::Raw => {
            // exactly one whitespace byte separates the header from the raster
            match data.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(PgmError::TruncatedHeader),
            }
            let bytes_per = if maxval > 255 { 2 } else { 1 };
            let expected = samples
                .checked_mul(bytes_per)
                .ok_or_else(|| PgmError::BadHeaderField(format!("{width}x{height}")))?;
            let payload = &data[cur.pos..];
            if payload.len() != expected {
                return Err(PgmError::PayloadLength {
                    expected,
                    actual: payload.len(),
                });
            }
            let mut values = Vec::with_capacity(samples);
            for chunk in payload.chunks_exact(bytes_per) {
                let v = if bytes_per == 2 {
                    u64::from(u16::from_be_bytes([chunk[0], chunk[1]]))
                } else {
                    u64::from(chunk[0])
                };
                if v > maxval {
                    return Err(PgmError::SampleAboveMaxval { value: v, maxval });
                }
                values.push(v as f64);
            }
            values
        }
        Variant::Plain => {
            // each plain sample takes at least two bytes, which bounds the
            // allocation by the input size
            let mut values = Vec::with_capacity(samples.min(data.len() / 2 + 1));
            while let Some(tok) = cur.token() {
                let v = parse_decimal(tok)
                    .ok_or_else(|| PgmError::BadSample(String::from_utf8_lossy(tok).into_owned()))?;
                if v > maxval {
                    return Err(PgmError::SampleAboveMaxval { value: v, maxval });
                }
                if values.len() == samples {
                    return Err(PgmError::SampleCount {
                        expected: samples,
                        actual: samples + 1,
                    });
                }
                values.push(v as f64);
            }
            if values.len() != samples {
                return Err(PgmError::SampleCount {
                    expected: samples,
                    actual: values.len(),
                });
            }
            values
        }
    };
    Ok(ImageMatrix::from_vec_unchecked(height as usize, width as usize, values))
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<ImageMatrix> {
    let path = path.as_ref();
    decode_pgm(&read_bytes(path)?).map_err(|e| Error::in_file(path, Error::Pgm(e)))
}

/// Encodes integer intensities in `0..=maxval` as a raw `P5` graymap.
pub fn encode_pgm_p5(m: &ImageMatrix, maxval: u16) -> Result<Vec<u8>> {
    if maxval == 0 {
        return Err(Error::Value("maxval must be positive".into()));
    }
    let mut out = format!("P5\n{} {}\n{}\n", m.cols(), m.rows(), maxval).into_bytes();
    let wide = maxval > 255;
    for &v in m.as_slice() {
        if v.fract() != 0.0 || v < 0.0 || v > f64::from(maxval) {
            return Err(Error::Value(format!("sample {v} is not an integer in 0..={maxval}")));
        }
        let v = v as u16;
        if wide {
            out.extend_from_slice(&v.to_be_bytes());
        } else {
            out.push(v as u8);
        }
    }
    Ok(out)
}

/// Writes `m` as a raw `P5` graymap.
pub fn write_pgm(m: &ImageMatrix, maxval: u16, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pgm_p5(m, maxval)?)
}
