//! In-control baseline fitting and per-frame sparsity readings over a
//! frame stream.
//!
//! The baseline (entrywise mean and pooled noise variance) is fit once on
//! the first `w0` frames and then frozen. Each later frame is turned into a
//! residual against that mean, and its Hoyer index is corrected for the
//! noise inflation predicted from the residual's own moments.

use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ImageMatrix;
use crate::numeric::{self, NeumaierSum};
use crate::sparsity::{self, hoyer_from_sums, moments_from_sums, MomentMode, SignalMoments};

/// In-control mean and noise variance, fit once on `w0` frames.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineModel {
    pub mu0_hat: ImageMatrix,
    pub sigma2_hat: f64,
    pub w0: usize,
}

impl BaselineModel {
    /// A baseline with a known mean and variance (no fitting).
    pub fn known(mu0: ImageMatrix, sigma2: f64, w0: usize) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::Value(format!(
                "sigma2 must be non-negative and finite, got {sigma2}"
            )));
        }
        Ok(Self {
            mu0_hat: mu0,
            sigma2_hat: sigma2,
            w0,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.mu0_hat.dims()
    }
}

/// Streaming per-pixel Welford accumulator behind [`fit_baseline`].
///
/// Holds one running mean and one sum of squared deviations per pixel, so
/// fitting never buffers frames.
#[derive(Debug, Clone)]
pub struct BaselineAccumulator {
    dims: Option<(usize, usize)>,
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Default for BaselineAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl BaselineAccumulator {
    pub fn new() -> Self {
        Self {
            dims: None,
            count: 0,
            mean: Vec::new(),
            m2: Vec::new(),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, frame: &ImageMatrix) -> Result<()> {
        match self.dims {
            None => {
                self.dims = Some(frame.dims());
                self.mean = vec![0.0; frame.len()];
                self.m2 = vec![0.0; frame.len()];
            }
            Some(d) if d != frame.dims() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: frame.dims(),
                })
            }
            Some(_) => {}
        }
        self.count += 1;
        let inv_n = 1.0 / self.count as f64;
        for ((mean, m2), &x) in self.mean.iter_mut().zip(&mut self.m2).zip(frame.as_slice()) {
            let delta = x - *mean;
            *mean += delta * inv_n;
            *m2 += delta * (x - *mean);
        }
        Ok(())
    }

    /// Entrywise mean, and the pooled variance `sum R^2 / (p1 p2 (w0 - 1))`.
    ///
    /// Residuals against the estimated mean have variance
    /// `sigma^2 (w0 - 1) / w0`; dividing by `w0 - 1` per pixel instead of
    /// `w0` makes the pooled estimate exactly unbiased.
    pub fn finish(self) -> Result<BaselineModel> {
        if self.count < 2 {
            return Err(Error::Value(format!(
                "baseline needs at least 2 in-control frames, got {}",
                self.count
            )));
        }
        let (rows, cols) = self.dims.expect("dims set after a push");
        let pooled: NeumaierSum = self.m2.iter().copied().collect();
        let denom = (rows * cols) as f64 * (self.count - 1) as f64;
        let sigma2_hat = (pooled.value() / denom).max(0.0);
        Ok(BaselineModel {
            mu0_hat: ImageMatrix::from_vec_unchecked(rows, cols, self.mean),
            sigma2_hat,
            w0: self.count,
        })
    }
}

/// Fits the in-control baseline on `frames` (the whole slice is the window).
pub fn fit_baseline(frames: &[ImageMatrix]) -> Result<BaselineModel> {
    if frames.len() < 2 {
        return Err(Error::Value(format!(
            "baseline needs w0 >= 2 frames, got {}",
            frames.len()
        )));
    }
    let mut acc = BaselineAccumulator::new();
    for f in frames {
        acc.push(f)?;
    }
    acc.finish()
}

/// `x - mu0_hat`, entrywise.
pub fn residual(x: &ImageMatrix, b: &BaselineModel) -> Result<ImageMatrix> {
    x.sub(&b.mu0_hat)
}

/// Entrywise average of the residuals of `frames`.
fn mean_residual(frames: &[ImageMatrix], b: &BaselineModel) -> Result<ImageMatrix> {
    if frames.is_empty() {
        return Err(Error::Value("empty window".into()));
    }
    let (rows, cols) = b.dims();
    let mut acc = vec![NeumaierSum::new(); rows * cols];
    for f in frames {
        b.mu0_hat.ensure_same_dims(f)?;
        for ((a, &x), &mu) in acc.iter_mut().zip(f.as_slice()).zip(b.mu0_hat.as_slice()) {
            a.add(x - mu);
        }
    }
    let w = frames.len() as f64;
    ImageMatrix::new(rows, cols, acc.iter().map(|a| a.value() / w).collect())
}

/// Hoyer index of the average residual over a window of frames.
///
/// No noise correction is applied; averaging `w` frames already divides the
/// noise variance by `w`, and the index converges to the anomaly's as the
/// window grows. See [`windowed_reading`] for the corrected variant.
pub fn windowed_index(frames: &[ImageMatrix], b: &BaselineModel) -> Result<f64> {
    sparsity::hoyer_index(&mean_residual(frames, b)?)
}

/// Corrected reading on the window-averaged residual, using `sigma2_hat / w`
/// as the effective noise variance.
pub fn windowed_reading(
    frames: &[ImageMatrix],
    b: &BaselineModel,
    mode: MomentMode,
) -> Result<SparsityReading> {
    let avg = mean_residual(frames, b)?;
    let sigma2 = b.sigma2_hat / frames.len() as f64;
    let s = numeric::sum_and_sum_sq(avg.as_slice());
    reading_from_sums(0, s.sum, s.sum_sq, avg.len(), sigma2, mode)
}

/// One corrected sparsity reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SparsityReading {
    /// Frame index of the reading.
    pub t: i64,
    pub h_raw: f64,
    pub bias: f64,
    /// `clamp(h_raw - bias, 0, 1)`.
    pub g: f64,
    pub g_unclamped: f64,
    pub moments: SignalMoments,
}

fn reading_from_sums(
    t: i64,
    sum: f64,
    sum_sq: f64,
    n: usize,
    sigma2: f64,
    mode: MomentMode,
) -> Result<SparsityReading> {
    if n < 2 {
        return Err(Error::Dimension(format!(
            "a sparsity index needs at least 2 entries, got {n}"
        )));
    }
    let h_raw = hoyer_from_sums(sum, sum_sq, n);
    let moments = moments_from_sums(sum, sum_sq, n, sigma2, mode);
    let c = sparsity::correct(h_raw, &moments)?;
    Ok(SparsityReading {
        t,
        h_raw,
        bias: c.bias,
        g: c.g,
        g_unclamped: c.g_unclamped,
        moments,
    })
}

/// Corrected Hoyer reading of a single frame against the baseline.
///
/// The returned reading has `t = 0`; [`monitor_series`] fills in frame
/// indices.
pub fn corrected_reading(x: &ImageMatrix, b: &BaselineModel, mode: MomentMode) -> Result<SparsityReading> {
    reading_at(0, x, b, mode)
}

fn reading_at(t: i64, x: &ImageMatrix, b: &BaselineModel, mode: MomentMode) -> Result<SparsityReading> {
    b.mu0_hat.ensure_same_dims(x)?;
    let s = numeric::sum_and_sum_sq_iter(
        x.as_slice()
            .iter()
            .zip(b.mu0_hat.as_slice())
            .map(|(&v, &mu)| v - mu),
    );
    reading_from_sums(t, s.sum, s.sum_sq, x.len(), b.sigma2_hat, mode)
}

/// Readings for every frame whose index falls in `tau_range`.
///
/// `frames[k]` carries index `first_t + k`. An empty range (start past
/// end) yields an empty series.
pub fn monitor_series(
    frames: &[ImageMatrix],
    first_t: i64,
    b: &BaselineModel,
    tau_range: RangeInclusive<i64>,
    mode: MomentMode,
) -> Result<Vec<SparsityReading>> {
    if tau_range.is_empty() {
        return Ok(Vec::new());
    }
    let last_t = first_t + frames.len() as i64 - 1;
    for &edge in [tau_range.start(), tau_range.end()] {
        if edge < first_t || edge > last_t {
            return Err(Error::OutOfRange {
                index: edge,
                lo: first_t,
                hi: last_t,
            });
        }
    }
    tau_range
        .map(|t| reading_at(t, &frames[(t - first_t) as usize], b, mode))
        .collect()
}

/// Single-pass monitor over a frame stream in arrival order.
///
/// The first `w0` frames fit the baseline; after that, every frame whose
/// index lies in the monitored range produces a reading. No frames are
/// buffered.
#[derive(Debug)]
pub struct StreamMonitor {
    w0: usize,
    tau_range: RangeInclusive<i64>,
    mode: MomentMode,
    next_t: i64,
    first_t: i64,
    accumulator: Option<BaselineAccumulator>,
    baseline: Option<BaselineModel>,
}

impl StreamMonitor {
    /// `first_t` labels the first frame pushed. The monitored range must
    /// start after the in-control window.
    pub fn new(first_t: i64, w0: usize, tau_range: RangeInclusive<i64>, mode: MomentMode) -> Result<Self> {
        if w0 < 2 {
            return Err(Error::Value(format!("w0 must be at least 2, got {w0}")));
        }
        let last_ic = first_t + w0 as i64 - 1;
        if !tau_range.is_empty() && *tau_range.start() <= last_ic {
            return Err(Error::Value(format!(
                "monitoring must start after the in-control window: tau starts at {}, \
                 in-control frames run {first_t}..={last_ic}",
                tau_range.start()
            )));
        }
        Ok(Self {
            w0,
            tau_range,
            mode,
            next_t: first_t,
            first_t,
            accumulator: Some(BaselineAccumulator::new()),
            baseline: None,
        })
    }

    pub fn baseline(&self) -> Option<&BaselineModel> {
        self.baseline.as_ref()
    }

    /// Index the next pushed frame will get.
    pub fn next_t(&self) -> i64 {
        self.next_t
    }

    /// True once every monitored frame has been seen.
    pub fn is_done(&self) -> bool {
        self.tau_range.is_empty() || self.next_t > *self.tau_range.end()
    }

    pub fn push(&mut self, frame: &ImageMatrix) -> Result<Option<SparsityReading>> {
        let t = self.next_t;
        self.next_t += 1;
        if let Some(acc) = self.accumulator.as_mut() {
            acc.push(frame)?;
            if acc.count() == self.w0 {
                let acc = self.accumulator.take().expect("accumulator present");
                self.baseline = Some(acc.finish()?);
            }
            return Ok(None);
        }
        let b = self.baseline.as_ref().expect("baseline fit before monitoring");
        if self.tau_range.contains(&t) {
            reading_at(t, frame, b, self.mode).map(Some)
        } else {
            b.mu0_hat.ensure_same_dims(frame)?;
            Ok(None)
        }
    }

    /// Fails if the stream ended before the monitored range was covered.
    pub fn finish(&self) -> Result<()> {
        if self.is_done() {
            return Ok(());
        }
        let last_seen = self.next_t - 1;
        let needed = if self.baseline.is_none() {
            self.first_t + self.w0 as i64 - 1
        } else {
            *self.tau_range.end()
        };
        Err(Error::OutOfRange {
            index: needed,
            lo: self.first_t,
            hi: last_seen,
        })
    }
}
