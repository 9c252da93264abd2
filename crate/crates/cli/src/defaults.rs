//! Default grids, window lengths and verification thresholds.

use sparsity_monitor::sim::make_dense_anomaly;
use sparsity_monitor::{ImageMatrix, Result};

pub const SEED: u64 = 7;

/// Simulation frame size.
pub const SIM_DIMS: (usize, usize) = (100, 200);
pub const SIM_W0: usize = 200;
pub const SIM_N_OOC: usize = 200;
pub const CONSISTENCY_SIGMA: f64 = 3.0;

/// In-control window for monitoring real frame streams.
pub const MONITOR_W0: usize = 100;

/// 0.5, 1.0, ..., 6.0
pub fn sigma_grid() -> Vec<f64> {
    (1..=12).map(|k| 0.5 * k as f64).collect()
}

/// 10, 20, ..., 100
pub fn c_grid() -> Vec<usize> {
    (1..=10).map(|k| 10 * k).collect()
}

pub const THEOREM1_DIMS: (usize, usize) = (400, 400);
pub const THEOREM1_SIGMA: f64 = 1.0;
pub const THEOREM1_REPS: usize = 50;
pub const THEOREM1_TOL: f64 = 0.01;

pub const COROLLARY1_SIGMA: f64 = 100.0;
pub const COROLLARY1_REPS: usize = 20;
pub const COROLLARY1_MIN_H: f64 = 0.95;

/// The 100x200 dense staircase stacked twice vertically (200x200).
pub fn corollary1_anomaly() -> Result<ImageMatrix> {
    make_dense_anomaly(100, 200)?.tile(2, 1)
}

/// 10^2, 10^3, 10^4 and 10^5 entries.
pub const LEMMA2_SIZES: [(usize, usize); 4] = [(10, 10), (10, 100), (100, 100), (100, 1000)];
pub const LEMMA2_SIGMA: f64 = 1.0;
pub const LEMMA2_REPS: usize = 50;
pub const LEMMA2_MAX_SPREAD: f64 = 3.0;
