//! Sparsity estimation for anomalies in noisy image streams.
//!
//! The crate measures how sparse an out-of-control anomaly is with the
//! Hoyer index, and removes the inflation that additive white noise causes
//! in that index:
//!
//! - [`sparsity`]: the indices, the noise bias and moment estimation.
//! - [`stream`]: baseline fitting and per-frame corrected readings.
//! - [`sim`]: synthetic anomalies, seeded noise and Monte Carlo drivers.
//! - [`io`]: CSV/PGM readers and the series/report writers.

pub mod error;
pub mod io;
pub mod matrix;
pub mod numeric;
pub mod sim;
pub mod sparsity;
pub mod stream;

pub use error::{Error, PgmError, Result};
pub use matrix::ImageMatrix;
pub use sparsity::{
    corrected_hoyer, estimate_moments, gini_index, hoyer_index, noise_bias, MomentMode, SignalMoments,
};
pub use stream::{
    corrected_reading, fit_baseline, monitor_series, residual, windowed_index, windowed_reading, BaselineModel,
    SparsityReading, StreamMonitor,
};
