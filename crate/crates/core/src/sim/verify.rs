//! Monte Carlo checks of the large-dimension behaviour of the Hoyer index
//! under white noise.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;
use crate::sparsity::{hoyer_index, noise_bias, SignalMoments};

use super::median;
use super::noise::{derive_seed, sample_noise, NoiseSpec};

/// Observed vs predicted noise inflation of the Hoyer index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasCheck {
    /// Mean over replicates of `h(A + e) - h(A)`.
    pub empirical_mean_gap: f64,
    /// `noise_bias` on the exact moments of `A`.
    pub predicted_bias: f64,
    pub abs_diff: f64,
    pub reps: usize,
}

fn noisy_indices(anomaly: &ImageMatrix, sigma: f64, reps: usize, seed: u64) -> Result<Vec<f64>> {
    let (rows, cols) = anomaly.dims();
    (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let e = sample_noise(rows, cols, &NoiseSpec::new(sigma, derive_seed(seed, r))?)?;
            hoyer_index(&anomaly.add(&e)?)
        })
        .collect()
}

/// Compares the mean gap `h(A + e) - h(A)` over `reps` noise draws with the
/// predicted bias. `sigma = 0` draws no noise and the gap is exactly 0.
pub fn verify_bias_theorem(anomaly: &ImageMatrix, sigma: f64, reps: usize, seed: u64) -> Result<BiasCheck> {
    if reps == 0 {
        return Err(Error::Value("need at least one replicate".into()));
    }
    let h_clean = hoyer_index(anomaly)?;
    let predicted_bias = noise_bias(&SignalMoments::of_matrix(anomaly, sigma * sigma)?)?;
    let empirical_mean_gap = if sigma == 0.0 {
        0.0
    } else {
        let hs = noisy_indices(anomaly, sigma, reps, seed)?;
        hs.iter().map(|h| h - h_clean).sum::<f64>() / reps as f64
    };
    Ok(BiasCheck {
        empirical_mean_gap,
        predicted_bias,
        abs_diff: (empirical_mean_gap - predicted_bias).abs(),
        reps,
    })
}

/// Hoyer index of `A + e` for every replicate under heavy noise, next to the
/// value the bias formula predicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergentNoiseCheck {
    pub values: Vec<f64>,
    pub min: f64,
    /// `h(A) + noise_bias(moments of A, sigma^2)`.
    pub predicted: f64,
}

pub fn verify_divergent_noise(
    anomaly: &ImageMatrix,
    sigma: f64,
    reps: usize,
    seed: u64,
) -> Result<DivergentNoiseCheck> {
    if reps == 0 {
        return Err(Error::Value("need at least one replicate".into()));
    }
    let predicted = hoyer_index(anomaly)? + noise_bias(&SignalMoments::of_matrix(anomaly, sigma * sigma)?)?;
    let values = noisy_indices(anomaly, sigma, reps, seed)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DivergentNoiseCheck {
        values,
        min,
        predicted,
    })
}

/// `|1 - h(e)| * sqrt(n / ln ln n)` for an `n`-entry noise matrix.
///
/// For white noise `1 - h(e) = (|sum e| / ||e||_F - 1) / (sqrt(n) - 1)`,
/// which is `O(sqrt(ln ln n / n))` in magnitude but may take either sign.
pub fn scaled_noise_statistic(one_minus_h: f64, n: usize) -> f64 {
    let n = n as f64;
    one_minus_h.abs() * (n / n.ln().ln()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub rows: usize,
    pub cols: usize,
    /// Median over replicates of `|1 - h(e)|`.
    pub median_one_minus_h: f64,
    /// Median over replicates of [`scaled_noise_statistic`].
    pub median_scaled: f64,
}

/// Medians of `|1 - h(e)|` and its rate-scaled version for white noise of
/// each size. Sizes need at least 3 entries so `ln ln n > 0`.
pub fn verify_noise_sparsity_decay(
    sizes: &[(usize, usize)],
    sigma: f64,
    reps: usize,
    seed: u64,
) -> Result<Vec<DecayRow>> {
    if reps == 0 {
        return Err(Error::Value("need at least one replicate".into()));
    }
    sizes
        .iter()
        .map(|&(rows, cols)| {
            let n = rows * cols;
            if n < 3 {
                return Err(Error::Dimension(format!("size {rows}x{cols} too small for ln ln n")));
            }
            let size_seed = derive_seed(seed, n as u64);
            let gaps: Vec<f64> = (0..reps as u64)
                .into_par_iter()
                .map(|r| {
                    let e = sample_noise(rows, cols, &NoiseSpec::new(sigma, derive_seed(size_seed, r))?)?;
                    Ok((1.0 - hoyer_index(&e)?).abs())
                })
                .collect::<Result<_>>()?;
            let scaled: Vec<f64> = gaps.iter().map(|&g| scaled_noise_statistic(g, n)).collect();
            Ok(DecayRow {
                rows,
                cols,
                median_one_minus_h: median(&gaps),
                median_scaled: median(&scaled),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_gap_is_exactly_zero() {
        let a = ImageMatrix::filled(20, 20, 1.0).unwrap();
        let c = verify_bias_theorem(&a, 0.0, 30, 1).unwrap();
        assert_eq!(c.empirical_mean_gap, 0.0);
        assert_eq!(c.predicted_bias, 0.0);
    }

    #[test]
    fn decay_single_size_single_row() {
        let rows = verify_noise_sparsity_decay(&[(10, 10)], 1.0, 5, 9).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(verify_noise_sparsity_decay(&[(1, 2)], 1.0, 5, 9).is_err());
    }
}
