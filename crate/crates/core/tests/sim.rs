use proptest::prelude::*;
use sparsity_monitor::sim::{
    cell_seed, derive_seed, error_band, make_dense_anomaly, make_scaled_anomaly, make_sparse_anomaly, median,
    run_consistency, run_robustness, sample_noise, simulate_residual_stream, stream_errors, verify_bias_theorem,
    verify_divergent_noise, verify_noise_sparsity_decay, AnomalyKind, NoiseSpec, StreamSettings,
};
use sparsity_monitor::{hoyer_index, noise_bias, ImageMatrix, MomentMode, SignalMoments};

fn small_settings() -> StreamSettings {
    StreamSettings {
        w0: 40,
        n_ooc: 30,
        mode: MomentMode::Debias,
    }
}

#[test]
fn noise_moments() {
    let sigma = 2.0;
    let e = sample_noise(1000, 1000, &NoiseSpec::new(sigma, 42).unwrap()).unwrap();
    let n = e.len() as f64;
    let mean = e.sum() / n;
    let var = e.as_slice().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    // five standard errors
    assert!(mean.abs() < 5.0 * sigma / n.sqrt(), "mean {mean}");
    assert!((var - 4.0).abs() < 5.0 * 4.0 * (2.0 / n).sqrt(), "var {var}");
}

#[test]
fn noise_is_seed_deterministic() {
    let spec = NoiseSpec::new(1.0, 99).unwrap();
    assert_eq!(sample_noise(13, 17, &spec).unwrap(), sample_noise(13, 17, &spec).unwrap());
    let other = NoiseSpec::new(1.0, 100).unwrap();
    assert_ne!(sample_noise(13, 17, &spec).unwrap(), sample_noise(13, 17, &other).unwrap());
}

#[test]
fn noise_spec_rejects_bad_sigma() {
    for s in [0.0, -1.0, f64::NAN, f64::INFINITY] {
        assert!(NoiseSpec::new(s, 1).is_err());
    }
}

#[test]
fn anomaly_shapes() {
    let dense = make_dense_anomaly(100, 200).unwrap();
    assert_eq!(dense.get(0, 0), 0.0);
    assert_eq!(dense.get(99, 49), 0.0);
    assert_eq!(dense.get(5, 50), 1.0);
    assert_eq!(dense.get(5, 199), 3.0);
    let sparse = make_sparse_anomaly(100, 200).unwrap();
    assert_eq!(sparse.get(0, 49), 5.0);
    assert_eq!(sparse.get(99, 58), 5.0);
    assert_eq!(sparse.get(0, 59), 0.0);
    assert_eq!(sparse.get(0, 48), 0.0);
    assert_eq!(sparse.sum(), 5000.0);
    assert!(make_scaled_anomaly(AnomalyKind::Dense, 15).is_err());
    assert!(make_scaled_anomaly(AnomalyKind::Dense, 0).is_err());
}

#[test]
fn scaled_patterns_keep_their_proportions() {
    // moments are shared across c, so h (sqrt(n) - 1) / sqrt(n) is constant
    let normalized = |kind, c: usize| {
        let a = make_scaled_anomaly(kind, c).unwrap();
        let root_n = (a.len() as f64).sqrt();
        hoyer_index(&a).unwrap() * (root_n - 1.0) / root_n
    };
    for kind in [AnomalyKind::Dense, AnomalyKind::Sparse] {
        let base = normalized(kind, 100);
        for c in [10, 20, 50, 90] {
            assert!((normalized(kind, c) - base).abs() < 1e-12, "{kind} c={c}");
        }
    }
    assert_eq!(make_scaled_anomaly(AnomalyKind::Dense, 100).unwrap(), make_dense_anomaly(100, 200).unwrap());
    let s100 = make_scaled_anomaly(AnomalyKind::Sparse, 100).unwrap();
    assert_eq!(s100.dims(), (100, 200));
    assert!((hoyer_index(&s100).unwrap() - 0.78192).abs() < 5e-6);
}

#[test]
fn tiny_noise_stream_is_the_anomaly() {
    let a = make_dense_anomaly(10, 20).unwrap();
    let stream = simulate_residual_stream(&a, NoiseSpec::new(1e-9, 3).unwrap(), 5, 5).unwrap();
    for (t, f) in stream.frames() {
        let target = if t > 0 { a.clone() } else { ImageMatrix::zeros(10, 20).unwrap() };
        let worst = f.sub(&target).unwrap().as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-7, "t={t} deviation {worst}");
    }
}

#[test]
fn in_control_frames_look_like_noise() {
    let a = make_dense_anomaly(100, 200).unwrap();
    let stream = simulate_residual_stream(&a, NoiseSpec::new(3.0, 8).unwrap(), 20, 1).unwrap();
    for t in stream.first_t()..=0 {
        assert!(hoyer_index(&stream.frame(t)).unwrap() >= 0.9);
    }
}

#[test]
fn stream_frames_replay() {
    let a = make_sparse_anomaly(10, 60).unwrap();
    let spec = NoiseSpec::new(2.0, 17).unwrap();
    let s1 = simulate_residual_stream(&a, spec, 6, 6).unwrap();
    let s2 = simulate_residual_stream(&a, spec, 6, 6).unwrap();
    assert_eq!(s1.len(), 12);
    assert_eq!((s1.first_t(), s1.last_t()), (-5, 6));
    for t in 1..=6 {
        let noise = sample_noise(10, 60, &s1.noise_spec_at(t)).unwrap();
        let f = s1.frame(t);
        assert_eq!(f, s2.frame(t));
        let d = f.sub(&noise).unwrap().sub(&a).unwrap();
        assert!(d.as_slice().iter().all(|v| v.abs() < 1e-12));
    }
    assert_eq!(s1.frame(0), sample_noise(10, 60, &s1.noise_spec_at(0)).unwrap());
}

#[test]
fn error_band_examples() {
    let b = error_band(&[0.1, 0.3]).unwrap();
    assert!((b.m_eps - 0.2).abs() < 1e-15);
    assert!((b.sigma_eps - 0.02f64.sqrt()).abs() < 1e-15);
    assert!((b.hi - b.lo - 2.0 * 1.96 * b.sigma_eps).abs() < 1e-15);
    assert!(error_band(&[0.1]).is_err());
    assert!(error_band(&[]).is_err());
}

#[test]
fn robustness_cells_are_independent_streams() {
    let settings = small_settings();
    let sigmas = [0.5, 2.0, 4.0];
    let rows = run_robustness(&sigmas, AnomalyKind::Sparse, (20, 60), 5, settings).unwrap();
    let reversed: Vec<f64> = sigmas.iter().rev().copied().collect();
    let rows_rev = run_robustness(&reversed, AnomalyKind::Sparse, (20, 60), 5, settings).unwrap();
    let a = make_sparse_anomaly(20, 60).unwrap();
    for (row, &s) in rows.iter().zip(&sigmas) {
        assert_eq!(row.x, s);
        assert_eq!(row.seed, cell_seed(5, AnomalyKind::Sparse, s));
        let manual = error_band(&stream_errors(&a, s, row.seed, settings).unwrap()).unwrap();
        assert_eq!(row.band, manual);
        let twin = rows_rev.iter().find(|r| r.x == s).unwrap();
        assert_eq!(twin.band, row.band);
    }
    assert_ne!(rows[0].seed, rows[1].seed);
}

#[test]
fn consistency_matches_direct_cell() {
    let settings = small_settings();
    let rows = run_consistency(&[10, 100], 3.0, AnomalyKind::Dense, 7, settings).unwrap();
    let direct = stream_errors(
        &make_dense_anomaly(100, 200).unwrap(),
        3.0,
        cell_seed(7, AnomalyKind::Dense, 100.0),
        settings,
    )
    .unwrap();
    assert_eq!(rows[1].band, error_band(&direct).unwrap());
    assert!(rows[1].band.m_eps < rows[0].band.m_eps);
}

#[test]
fn sweeps_reject_bad_grids() {
    let s = small_settings();
    assert!(run_robustness(&[], AnomalyKind::Dense, (10, 200), 1, s).is_err());
    assert!(run_robustness(&[0.0], AnomalyKind::Dense, (10, 200), 1, s).is_err());
    assert!(run_consistency(&[], 1.0, AnomalyKind::Dense, 1, s).is_err());
    assert!(run_consistency(&[10, 25], 1.0, AnomalyKind::Dense, 1, s).is_err());
}

#[test]
fn bias_prediction_on_tiled_pattern() {
    let a = make_dense_anomaly(100, 200).unwrap().tile(4, 4).unwrap();
    assert_eq!(a.dims(), (400, 800));
    let c = verify_bias_theorem(&a, 2.0, 20, 7).unwrap();
    let expected = noise_bias(&SignalMoments::new(1.5, 3.5, 4.0).unwrap()).unwrap();
    assert!((c.predicted_bias - expected).abs() < 1e-12);
    assert!(c.abs_diff < 0.01, "{c:?}");
}

#[test]
fn bias_check_without_noise() {
    let a = make_sparse_anomaly(20, 60).unwrap();
    let c = verify_bias_theorem(&a, 0.0, 10, 1).unwrap();
    assert_eq!((c.empirical_mean_gap, c.predicted_bias, c.abs_diff), (0.0, 0.0, 0.0));
    assert!(verify_bias_theorem(&a, 1.0, 0, 1).is_err());
}

#[test]
fn heavy_noise_pushes_index_to_one() {
    let a = make_dense_anomaly(100, 200).unwrap().tile(2, 1).unwrap();
    let c = verify_divergent_noise(&a, 100.0, 10, 7).unwrap();
    assert_eq!(c.values.len(), 10);
    assert!(c.min > 0.95);
    assert!((c.predicted - 0.986).abs() < 1e-3);
}

#[test]
fn noise_index_gap_decays_with_size() {
    let rows = verify_noise_sparsity_decay(&[(10, 10), (100, 100)], 1.0, 50, 7).unwrap();
    // 100x more entries: gap shrinks by about sqrt(100) = 10 up to the ln ln factor
    let ratio = rows[0].median_one_minus_h / rows[1].median_one_minus_h;
    assert!((4.0..25.0).contains(&ratio), "ratio {ratio}");
    let spread = rows[0].median_scaled.max(rows[1].median_scaled) / rows[0].median_scaled.min(rows[1].median_scaled);
    assert!(spread < 3.0);
}

#[test]
fn decay_statistic_ignores_noise_scale() {
    let a = verify_noise_sparsity_decay(&[(10, 30)], 1.0, 11, 3).unwrap();
    let b = verify_noise_sparsity_decay(&[(10, 30)], 2.0, 11, 3).unwrap();
    assert!((a[0].median_one_minus_h - b[0].median_one_minus_h).abs() < 1e-12);
}

#[test]
fn median_of_even_and_odd() {
    assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
}

#[test]
fn sim_is_deterministic() {
    let s = small_settings();
    let a = run_robustness(&[1.0, 3.0], AnomalyKind::Dense, (10, 200), 7, s).unwrap();
    let b = run_robustness(&[1.0, 3.0], AnomalyKind::Dense, (10, 200), 7, s).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn error_band_matches_two_pass(errors in prop::collection::vec(0.0f64..2.0, 2..200)) {
        let n = errors.len() as f64;
        let mean = errors.iter().sum::<f64>() / n;
        let sd = (errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0)).sqrt();
        let b = error_band(&errors).unwrap();
        prop_assert!((b.m_eps - mean).abs() < 1e-12);
        prop_assert!((b.sigma_eps - sd).abs() < 1e-12);
        prop_assert!((b.lo - (mean - 1.96 * sd)).abs() < 1e-12);
        prop_assert!((b.hi - (mean + 1.96 * sd)).abs() < 1e-12);
    }

    #[test]
    fn derived_seeds_differ(master in any::<u64>(), k in 0u64..1000) {
        prop_assert_ne!(derive_seed(master, k), derive_seed(master, k + 1));
        prop_assert_eq!(derive_seed(master, k), derive_seed(master, k));
    }
}
