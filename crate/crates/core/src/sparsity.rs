//! Sparsity indices and the additive-noise bias correction.
//!
//! Everything here is a pure function of its inputs.
//!
//! The Hoyer index used throughout is
//!
//! ```text
//! h(X) = (sqrt(n) - |sum X| / ||X||_F) / (sqrt(n) - 1),   n = rows * cols
//! ```
//!
//! Note the numerator uses the absolute value of the *signed* sum rather
//! than the L1 norm. For same-sign matrices the two agree and
//! `0 <= h <= 1`. For mixed-sign matrices `|sum X|` may fall below
//! `||X||_F`, and `h` then lies in `(1, sqrt(n) / (sqrt(n) - 1)]`. This is
//! what makes a white-noise matrix look maximally sparse (`h -> 1`) and is
//! the quantity whose noise bias [`noise_bias`] describes, so it is not
//! clamped.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;
use crate::numeric::NeumaierSum;

/// How the average squared anomaly is estimated from a residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentMode {
    /// `||R||_F^2 / n` used as-is. This estimates the squared anomaly
    /// *plus* the noise variance, so the correction shrinks as noise grows.
    Literal,
    /// `||R||_F^2 / n - sigma2`, floored at `a_bar^2` (and a tiny positive
    /// epsilon) so the moments stay valid.
    #[default]
    Debias,
}

impl fmt::Display for MomentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentMode::Literal => "literal",
            MomentMode::Debias => "debias",
        })
    }
}

impl FromStr for MomentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(MomentMode::Literal),
            "debias" => Ok(MomentMode::Debias),
            other => Err(Error::Value(format!(
                "unknown moment mode `{other}` (expected literal or debias)"
            ))),
        }
    }
}

/// Per-pixel signal moments feeding the bias expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignalMoments {
    /// Average anomaly magnitude per pixel, `|sum A| / n`.
    pub a_bar: f64,
    /// Average squared anomaly per pixel, `||A||_F^2 / n`.
    pub a2_bar: f64,
    /// Entrywise noise variance.
    pub sigma2: f64,
}

impl SignalMoments {
    pub fn new(a_bar: f64, a2_bar: f64, sigma2: f64) -> Result<Self> {
        let m = Self {
            a_bar,
            a2_bar,
            sigma2,
        };
        m.validate()?;
        Ok(m)
    }

    /// Exact moments of a known anomaly matrix paired with a noise variance.
    pub fn of_matrix(a: &ImageMatrix, sigma2: f64) -> Result<Self> {
        let n = a.len() as f64;
        let s = a.moments();
        Self::new(s.sum.abs() / n, s.sum_sq / n, sigma2)
    }

    fn validate(&self) -> Result<()> {
        if !(self.a2_bar.is_finite() && self.a2_bar > 0.0) {
            return Err(Error::Value(format!(
                "a2_bar must be positive and finite, got {}",
                self.a2_bar
            )));
        }
        if !(self.a_bar.is_finite() && self.a_bar >= 0.0) {
            return Err(Error::Value(format!(
                "a_bar must be non-negative and finite, got {}",
                self.a_bar
            )));
        }
        if !(self.sigma2.is_finite() && self.sigma2 >= 0.0) {
            return Err(Error::Value(format!(
                "sigma2 must be non-negative and finite, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }
}

fn require_indexable(x: &ImageMatrix) -> Result<()> {
    if x.len() < 2 {
        return Err(Error::Dimension(format!(
            "a sparsity index needs at least 2 entries, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(())
}

/// Hoyer index from a precomputed signed sum and squared Frobenius norm.
pub(crate) fn hoyer_from_sums(sum: f64, sum_sq: f64, n: usize) -> f64 {
    if sum_sq == 0.0 {
        // blank matrix: treated as maximally sparse
        return 1.0;
    }
    let root_n = (n as f64).sqrt();
    let ratio = sum.abs() / sum_sq.sqrt();
    ((root_n - ratio) / (root_n - 1.0)).max(0.0)
}

/// Hoyer sparsity index of a matrix. The all-zero matrix maps to 1.
pub fn hoyer_index(x: &ImageMatrix) -> Result<f64> {
    require_indexable(x)?;
    let max_abs = x.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_abs == 0.0 {
        return Ok(1.0);
    }
    // Squares of very large or very small entries over/underflow; the
    // index is scale invariant so rescaling is exact in exact arithmetic.
    let m = if (1e-100..=1e100).contains(&max_abs) {
        x.moments()
    } else {
        let inv = 1.0 / max_abs;
        let scaled: Vec<f64> = x.as_slice().iter().map(|v| v * inv).collect();
        crate::numeric::sum_and_sum_sq(&scaled)
    };
    Ok(hoyer_from_sums(m.sum, m.sum_sq, x.len()))
}

/// Gini sparsity index of the entry magnitudes.
///
/// With magnitudes sorted ascending as `c_1 <= ... <= c_n`,
/// `G = 1 - 2 * sum_k (c_k / ||c||_1) * (n - k + 1/2) / n`.
/// O(n log n); intended as a slow cross-check for [`hoyer_index`].
pub fn gini_index(x: &ImageMatrix) -> Result<f64> {
    require_indexable(x)?;
    let mut mags: Vec<f64> = x.as_slice().iter().map(|v| v.abs()).collect();
    let max_abs = mags.iter().fold(0.0f64, |m, &v| m.max(v));
    if max_abs == 0.0 {
        return Ok(1.0);
    }
    for v in &mut mags {
        *v /= max_abs;
    }
    mags.sort_unstable_by(f64::total_cmp);
    let n = mags.len() as f64;
    let l1: NeumaierSum = mags.iter().copied().collect();
    let l1 = l1.value();
    let weighted: NeumaierSum = mags
        .iter()
        .enumerate()
        .map(|(k, &c)| c * (n - (k + 1) as f64 + 0.5))
        .collect();
    let g = 1.0 - 2.0 * weighted.value() / (l1 * n);
    Ok(g.clamp(0.0, 1.0))
}

/// Asymptotic inflation of the Hoyer index caused by additive white noise
/// of variance `sigma2` on an anomaly with moments `(a_bar, a2_bar)`:
///
/// ```text
/// a_bar * sigma2 / ( sqrt(a2 (a2 + sigma2)) * (sqrt(a2) + sqrt(a2 + sigma2)) )
/// ```
///
/// Algebraically this is `a_bar/sqrt(a2) - a_bar/sqrt(a2 + sigma2)`; the
/// product form avoids cancellation for small `sigma2`. The value lies in
/// `[0, a_bar / sqrt(a2_bar))` and approaches the upper end as
/// `sigma2 -> inf`.
pub fn noise_bias(m: &SignalMoments) -> Result<f64> {
    m.validate()?;
    let a2 = m.a2_bar;
    let total = a2 + m.sigma2;
    let denom = (a2 * total).sqrt() * (a2.sqrt() + total.sqrt());
    Ok(m.a_bar * m.sigma2 / denom)
}

/// Bias-corrected index together with its pieces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correction {
    pub bias: f64,
    pub g: f64,
    pub g_unclamped: f64,
}

/// Subtracts the noise bias from a raw Hoyer index.
pub fn correct(h_raw: f64, m: &SignalMoments) -> Result<Correction> {
    if !h_raw.is_finite() || h_raw < 0.0 {
        return Err(Error::Value(format!(
            "raw index must be finite and non-negative, got {h_raw}"
        )));
    }
    let bias = noise_bias(m)?;
    let g_unclamped = h_raw - bias;
    Ok(Correction {
        bias,
        g: g_unclamped.clamp(0.0, 1.0),
        g_unclamped,
    })
}

/// Corrected Hoyer index, clamped to `[0, 1]`.
pub fn corrected_hoyer(h_raw: f64, m: &SignalMoments) -> Result<f64> {
    Ok(correct(h_raw, m)?.g)
}

/// Floor applied to `a2_bar` so the bias denominator never degenerates.
pub fn a2_floor(sigma2_hat: f64) -> f64 {
    (1e-12 * sigma2_hat).max(1e-300)
}

pub(crate) fn moments_from_sums(
    sum: f64,
    sum_sq: f64,
    n: usize,
    sigma2_hat: f64,
    mode: MomentMode,
) -> SignalMoments {
    let n = n as f64;
    let a_bar = sum.abs() / n;
    let raw_a2 = sum_sq / n;
    let a2_bar = match mode {
        MomentMode::Literal => raw_a2,
        MomentMode::Debias => raw_a2 - sigma2_hat,
    }
    .max(a_bar * a_bar)
    .max(a2_floor(sigma2_hat));
    SignalMoments {
        a_bar,
        a2_bar,
        sigma2: sigma2_hat,
    }
}

/// Plug-in anomaly moments from a residual matrix.
///
/// `a_bar = |sum R| / n` in both modes. `a2_bar` is `||R||_F^2 / n` in
/// [`MomentMode::Literal`] and `||R||_F^2 / n - sigma2_hat` in
/// [`MomentMode::Debias`]; both are then floored at `a_bar^2` and
/// [`a2_floor`].
pub fn estimate_moments(r: &ImageMatrix, sigma2_hat: f64, mode: MomentMode) -> Result<SignalMoments> {
    if !(sigma2_hat.is_finite() && sigma2_hat >= 0.0) {
        return Err(Error::Value(format!(
            "sigma2_hat must be non-negative and finite, got {sigma2_hat}"
        )));
    }
    let s = r.moments();
    Ok(moments_from_sums(s.sum, s.sum_sq, r.len(), sigma2_hat, mode))
}

/// Positive and negative mass of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignBalance {
    pub positive: f64,
    pub negative: f64,
}

impl SignBalance {
    pub fn of(x: &ImageMatrix) -> Self {
        let mut pos = NeumaierSum::new();
        let mut neg = NeumaierSum::new();
        for &v in x.as_slice() {
            if v > 0.0 {
                pos.add(v);
            } else {
                neg.add(-v);
            }
        }
        Self {
            positive: pos.value(),
            negative: neg.value(),
        }
    }

    /// Ratio of positive to negative mass within `[0.25, 4]`. In this
    /// regime `|sum X|` no longer reflects the anomaly's support and the
    /// Hoyer index is unreliable.
    pub fn is_mixed(&self) -> bool {
        if self.positive == 0.0 || self.negative == 0.0 {
            return false;
        }
        let ratio = self.positive / self.negative;
        (0.25..=4.0).contains(&ratio)
    }
}
