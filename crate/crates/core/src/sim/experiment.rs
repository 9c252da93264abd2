use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;
use crate::numeric::NeumaierSum;
use crate::sparsity::{hoyer_index, MomentMode};
use crate::stream::{corrected_reading, BaselineAccumulator};

use super::anomaly::{make_dense_anomaly, make_scaled_anomaly, make_sparse_anomaly, AnomalyKind};
use super::noise::{derive_seed, fill_noise, NoiseSpec};

/// Residual stream with a change at `t = 0`: frames `t <= 0` are pure
/// noise, frames `t > 0` are `A + e_t`.
///
/// Frames are generated on demand. The noise of frame `t` is seeded with
/// `derive_seed(spec.seed, t)`, so any frame can be regenerated alone.
#[derive(Debug, Clone)]
pub struct ResidualStream {
    anomaly: ImageMatrix,
    spec: NoiseSpec,
    n_ic: usize,
    n_ooc: usize,
}

pub fn simulate_residual_stream(
    anomaly: &ImageMatrix,
    spec: NoiseSpec,
    n_ic: usize,
    n_ooc: usize,
) -> Result<ResidualStream> {
    if n_ic == 0 || n_ooc == 0 {
        return Err(Error::Value(format!(
            "stream needs at least one frame per regime, got n_ic={n_ic}, n_ooc={n_ooc}"
        )));
    }
    NoiseSpec::new(spec.sigma, spec.seed)?;
    Ok(ResidualStream {
        anomaly: anomaly.clone(),
        spec,
        n_ic,
        n_ooc,
    })
}

impl ResidualStream {
    pub fn first_t(&self) -> i64 {
        1 - self.n_ic as i64
    }

    pub fn last_t(&self) -> i64 {
        self.n_ooc as i64
    }

    pub fn len(&self) -> usize {
        self.n_ic + self.n_ooc
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn anomaly(&self) -> &ImageMatrix {
        &self.anomaly
    }

    pub fn noise_spec_at(&self, t: i64) -> NoiseSpec {
        NoiseSpec {
            sigma: self.spec.sigma,
            seed: derive_seed(self.spec.seed, t as u64),
        }
    }

    /// Frame `t`, panicking outside `first_t()..=last_t()`.
    pub fn frame(&self, t: i64) -> ImageMatrix {
        assert!(
            (self.first_t()..=self.last_t()).contains(&t),
            "frame {t} outside stream"
        );
        let mut data = vec![0.0; self.anomaly.len()];
        fill_noise(&mut data, &mut self.noise_spec_at(t).rng(), self.spec.sigma);
        if t > 0 {
            for (v, a) in data.iter_mut().zip(self.anomaly.as_slice()) {
                *v += a;
            }
        }
        ImageMatrix::from_vec_unchecked(self.anomaly.rows(), self.anomaly.cols(), data)
    }

    /// All frames as `(t, frame)` in time order.
    pub fn frames(&self) -> impl Iterator<Item = (i64, ImageMatrix)> + '_ {
        (self.first_t()..=self.last_t()).map(move |t| (t, self.frame(t)))
    }
}

/// Mean absolute error with a `+-1.96 sd` band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBand {
    pub m_eps: f64,
    /// Sample standard deviation (denominator `n - 1`).
    pub sigma_eps: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ErrorBand {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Band over per-frame errors `|g_t - h(A)|`. Needs at least two errors.
pub fn error_band(errors: &[f64]) -> Result<ErrorBand> {
    if errors.len() < 2 {
        return Err(Error::Value(format!(
            "error band needs at least 2 errors, got {}",
            errors.len()
        )));
    }
    // Welford
    let mut mean = 0.0;
    let mut m2 = NeumaierSum::new();
    for (k, &e) in errors.iter().enumerate() {
        let delta = e - mean;
        mean += delta / (k + 1) as f64;
        m2.add(delta * (e - mean));
    }
    let sigma_eps = (m2.value().max(0.0) / (errors.len() - 1) as f64).sqrt();
    Ok(ErrorBand {
        m_eps: mean,
        sigma_eps,
        lo: mean - 1.96 * sigma_eps,
        hi: mean + 1.96 * sigma_eps,
    })
}

/// One row of a sweep table: the swept value and its error band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandRow {
    pub x: f64,
    pub seed: u64,
    #[serde(flatten)]
    pub band: ErrorBand,
}

/// Stream layout shared by the sweep drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamSettings {
    /// In-control frames, all used to fit the baseline.
    pub w0: usize,
    pub n_ooc: usize,
    pub mode: MomentMode,
}

impl Default for StreamSettings {
    fn default() -> Self {
        Self {
            w0: 200,
            n_ooc: 200,
            mode: MomentMode::Debias,
        }
    }
}

/// Seed of one sweep cell, keyed by anomaly kind and swept value.
pub fn cell_seed(master: u64, kind: AnomalyKind, x: f64) -> u64 {
    derive_seed(derive_seed(master, kind.tag()), x.to_bits())
}

/// Per-frame errors `|g_t - h(A)|` for the OOC frames of one stream.
///
/// The baseline is fit on the `w0` in-control frames of the stream, then
/// every OOC frame is read against it.
pub fn stream_errors(anomaly: &ImageMatrix, sigma: f64, seed: u64, settings: StreamSettings) -> Result<Vec<f64>> {
    let h_true = hoyer_index(anomaly)?;
    let stream = simulate_residual_stream(anomaly, NoiseSpec::new(sigma, seed)?, settings.w0, settings.n_ooc)?;
    let mut acc = BaselineAccumulator::new();
    for t in stream.first_t()..=0 {
        acc.push(&stream.frame(t))?;
    }
    let baseline = acc.finish()?;
    (1..=stream.last_t())
        .map(|t| {
            let r = corrected_reading(&stream.frame(t), &baseline, settings.mode)?;
            Ok((r.g - h_true).abs())
        })
        .collect()
}

fn sweep(
    xs: &[f64],
    kind: AnomalyKind,
    seed: u64,
    settings: StreamSettings,
    cell: impl Fn(f64) -> Result<(ImageMatrix, f64)> + Sync,
) -> Result<Vec<BandRow>> {
    xs.par_iter()
        .map(|&x| {
            let (anomaly, sigma) = cell(x)?;
            let s = cell_seed(seed, kind, x);
            let errors = stream_errors(&anomaly, sigma, s, settings)?;
            Ok(BandRow {
                x,
                seed: s,
                band: error_band(&errors)?,
            })
        })
        .collect()
}

/// Error bands across noise levels on a fixed-size anomaly.
pub fn run_robustness(
    sigmas: &[f64],
    kind: AnomalyKind,
    dims: (usize, usize),
    seed: u64,
    settings: StreamSettings,
) -> Result<Vec<BandRow>> {
    if sigmas.is_empty() {
        return Err(Error::Value("empty sigma grid".into()));
    }
    let anomaly = match kind {
        AnomalyKind::Dense => make_dense_anomaly(dims.0, dims.1)?,
        AnomalyKind::Sparse => make_sparse_anomaly(dims.0, dims.1)?,
    };
    sweep(sigmas, kind, seed, settings, |s| Ok((anomaly.clone(), s)))
}

/// Error bands across dimension magnifications at a fixed noise level.
pub fn run_consistency(
    cs: &[usize],
    sigma: f64,
    kind: AnomalyKind,
    seed: u64,
    settings: StreamSettings,
) -> Result<Vec<BandRow>> {
    if cs.is_empty() {
        return Err(Error::Value("empty magnification grid".into()));
    }
    // validate the whole grid before spending time on any cell
    for &c in cs {
        make_scaled_anomaly(kind, c)?;
    }
    let xs: Vec<f64> = cs.iter().map(|&c| c as f64).collect();
    sweep(&xs, kind, seed, settings, |c| Ok((make_scaled_anomaly(kind, c as usize)?, sigma)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_errors_have_zero_width() {
        let b = error_band(&[0.05; 10]).unwrap();
        assert!((b.m_eps - 0.05).abs() < 1e-15);
        assert_eq!(b.sigma_eps, 0.0);
        assert_eq!(b.lo, b.m_eps);
        assert_eq!(b.hi, b.m_eps);
    }

    #[test]
    fn two_point_band() {
        let b = error_band(&[0.0, 0.1]).unwrap();
        // brute force: mean 0.05, var = (0.05^2 + 0.05^2) / 1
        let sd = (2.0 * 0.05f64.powi(2)).sqrt();
        assert!((b.m_eps - 0.05).abs() < 1e-15);
        assert!((b.sigma_eps - sd).abs() < 1e-15);
        assert!((b.lo - (0.05 - 1.96 * sd)).abs() < 1e-15);
        assert!((b.hi - (0.05 + 1.96 * sd)).abs() < 1e-15);
    }

    #[test]
    fn band_needs_two_errors() {
        assert!(error_band(&[0.1]).is_err());
        assert!(error_band(&[]).is_err());
    }

    #[test]
    fn stream_layout() {
        let a = make_sparse_anomaly(4, 60).unwrap();
        let s = simulate_residual_stream(&a, NoiseSpec::new(1.0, 3).unwrap(), 200, 200).unwrap();
        assert_eq!((s.first_t(), s.last_t(), s.len()), (-199, 200, 400));
        assert_eq!(s.frames().count(), 400);
        assert!(simulate_residual_stream(&a, NoiseSpec { sigma: 1.0, seed: 0 }, 0, 1).is_err());
    }

    #[test]
    fn empty_grids_rejected() {
        let st = StreamSettings::default();
        assert!(run_robustness(&[], AnomalyKind::Dense, (10, 20), 0, st).is_err());
        assert!(run_consistency(&[], 3.0, AnomalyKind::Dense, 0, st).is_err());
        assert!(run_consistency(&[10, 15], 3.0, AnomalyKind::Dense, 0, st).is_err());
    }
}
