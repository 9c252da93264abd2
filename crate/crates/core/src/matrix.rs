use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, Moments};

/// A `rows x cols` grid of finite pixel intensities, stored row-major.
///
/// Frames, anomalies, noise draws and residuals are all carried as an
/// `ImageMatrix`. Every constructor rejects NaN and infinities, so code
/// downstream can assume finite entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ImageMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Internal constructor for data already known to be finite.
    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(Self::from_vec_unchecked(rows, cols, vec![0.0; rows * cols]))
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    /// Builds a matrix from `f(i, j)` with 0-based indices.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {} has {} entries, expected {cols}",
                bad + 1,
                rows[bad].len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Number of entries, `rows * cols`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Entry at 0-based `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn ensure_same_dims(&self, other: &ImageMatrix) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    pub fn sub(&self, other: &ImageMatrix) -> Result<ImageMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &ImageMatrix) -> Result<ImageMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &ImageMatrix, f: impl Fn(f64, f64) -> f64) -> Result<ImageMatrix> {
        self.ensure_same_dims(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ImageMatrix::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: f64) -> Result<ImageMatrix> {
        ImageMatrix::new(self.rows, self.cols, self.data.iter().map(|v| v * c).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<ImageMatrix> {
        ImageMatrix::new(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }

    /// Repeats the matrix `down` times vertically and `across` times horizontally.
    pub fn tile(&self, down: usize, across: usize) -> Result<ImageMatrix> {
        let rows = self.rows * down;
        let cols = self.cols * across;
        ImageMatrix::from_fn(rows, cols, |i, j| self.get(i % self.rows, j % self.cols))
    }

    /// Compensated sum of entries.
    pub fn sum(&self) -> f64 {
        numeric::sum(&self.data)
    }

    /// Squared Frobenius norm, compensated.
    pub fn frobenius_sq(&self) -> f64 {
        self.moments().sum_sq
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    pub(crate) fn moments(&self) -> Moments {
        numeric::sum_and_sum_sq(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(format!(
            "matrix dimensions must be positive, got {rows}x{cols}"
        )));
    }
    rows.checked_mul(cols)
        .ok_or_else(|| Error::Dimension(format!("{rows}x{cols} overflows")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        let err = ImageMatrix::new(1, 2, vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, col: 1 }));
        assert!(ImageMatrix::new(2, 1, vec![f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn rejects_empty_and_wrong_length() {
        assert!(ImageMatrix::zeros(0, 3).is_err());
        assert!(ImageMatrix::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        let err = ImageMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn sub_then_add_reconstructs() {
        let x = ImageMatrix::from_fn(3, 4, |i, j| (i * 7 + j) as f64 * 0.37).unwrap();
        let m = ImageMatrix::from_fn(3, 4, |i, j| (i + j) as f64 * 1.1).unwrap();
        let r = x.sub(&m).unwrap();
        assert_eq!(r.add(&m).unwrap(), x);
    }

    #[test]
    fn tile_repeats_pattern() {
        let m = ImageMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let t = m.tile(2, 2).unwrap();
        assert_eq!(t.dims(), (2, 4));
        assert_eq!(t.row(1), &[1.0, 2.0, 1.0, 2.0]);
    }

    #[test]
    fn mismatch_reports_dims() {
        let a = ImageMatrix::zeros(2, 2).unwrap();
        let b = ImageMatrix::zeros(2, 3).unwrap();
        assert!(matches!(
            a.sub(&b),
            Err(Error::DimensionMismatch { expected: (2, 2), actual: (2, 3) })
        ));
    }
}
