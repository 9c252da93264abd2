use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnomalyKind {
    /// Four equal-width column bands with values 0, 1, 2, 3.
    Dense,
    /// A narrow band of columns with value 5, zero elsewhere.
    Sparse,
}

impl AnomalyKind {
    pub(crate) fn tag(self) -> u64 {
        match self {
            AnomalyKind::Dense => 1,
            AnomalyKind::Sparse => 2,
        }
    }
}

impl fmt::Display for AnomalyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnomalyKind::Dense => "dense",
            AnomalyKind::Sparse => "sparse",
        })
    }
}

impl FromStr for AnomalyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(AnomalyKind::Dense),
            "sparse" => Ok(AnomalyKind::Sparse),
            other => Err(Error::Value(format!(
                "unknown anomaly kind `{other}` (expected dense or sparse)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AnomalyShape {
    /// Explicit dimensions with the fixed 50-column band layout.
    Fixed { rows: usize, cols: usize },
    /// `c x 2c`, bands scaled with `c`.
    Scaled { c: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnomalySpec {
    pub kind: AnomalyKind,
    pub shape: AnomalyShape,
}

impl AnomalySpec {
    pub fn build(&self) -> Result<ImageMatrix> {
        match self.shape {
            AnomalyShape::Fixed { rows, cols } => match self.kind {
                AnomalyKind::Dense => make_dense_anomaly(rows, cols),
                AnomalyKind::Sparse => make_sparse_anomaly(rows, cols),
            },
            AnomalyShape::Scaled { c } => make_scaled_anomaly(self.kind, c),
        }
    }
}

/// Staircase `A_ij = floor((j - 1) / 50)` (1-based `j`).
pub fn make_dense_anomaly(rows: usize, cols: usize) -> Result<ImageMatrix> {
    ImageMatrix::from_fn(rows, cols, |_, j| (j / 50) as f64)
}

/// Band `A_ij = 5` for `50 <= j < 60` (1-based `j`), zero elsewhere.
pub fn make_sparse_anomaly(rows: usize, cols: usize) -> Result<ImageMatrix> {
    ImageMatrix::from_fn(rows, cols, |_, j| if (50..60).contains(&(j + 1)) { 5.0 } else { 0.0 })
}

/// Magnified anomaly on a `c x 2c` grid.
///
/// Dense: `A_ij = floor(4 (j - 1) / 2c)`. Sparse: `5` for
/// `c/2 <= j < c/2 + c/10`. `c` must be a positive multiple of 10 so both
/// band edges are integers.
pub fn make_scaled_anomaly(kind: AnomalyKind, c: usize) -> Result<ImageMatrix> {
    if c == 0 || !c.is_multiple_of(10) {
        return Err(Error::Value(format!(
            "magnification must be a positive multiple of 10, got {c}"
        )));
    }
    let (rows, cols) = (c, 2 * c);
    match kind {
        AnomalyKind::Dense => ImageMatrix::from_fn(rows, cols, |_, j| ((4 * j) / cols) as f64),
        AnomalyKind::Sparse => {
            let start = cols / 4;
            let end = start + c / 10;
            ImageMatrix::from_fn(rows, cols, |_, j| if (start..end).contains(&(j + 1)) { 5.0 } else { 0.0 })
        }
    }
}
