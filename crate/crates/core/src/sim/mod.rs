//! Synthetic anomalies, seeded noise and the Monte Carlo drivers built on
//! them.
//!
//! Every driver is deterministic in its seed. Independent cells (one noise
//! level, one magnification, one replicate) draw from sub-seeds obtained
//! with [`derive_seed`], keyed by the cell's own parameters rather than its
//! position, so results do not depend on grid order or on how cells are
//! scheduled across threads.

mod anomaly;
mod experiment;
mod noise;
mod verify;

pub use anomaly::{
    make_dense_anomaly, make_scaled_anomaly, make_sparse_anomaly, AnomalyKind, AnomalyShape, AnomalySpec,
};
pub use experiment::{
    cell_seed, error_band, run_consistency, run_robustness, simulate_residual_stream, stream_errors, BandRow,
    ErrorBand, ResidualStream, StreamSettings,
};
pub use noise::{derive_seed, sample_noise, NoiseSpec};
pub use verify::{
    scaled_noise_statistic, verify_bias_theorem, verify_divergent_noise, verify_noise_sparsity_decay, BiasCheck,
    DecayRow, DivergentNoiseCheck,
};

/// Median of a non-empty list (mean of the two middle values for even
/// lengths).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty list");
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
