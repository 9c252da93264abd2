use proptest::prelude::*;
use sparsity_monitor::sim::{make_dense_anomaly, make_sparse_anomaly, sample_noise, NoiseSpec};
use sparsity_monitor::sparsity::{a2_floor, correct};
use sparsity_monitor::{
    corrected_hoyer, estimate_moments, gini_index, hoyer_index, noise_bias, ImageMatrix, MomentMode, SignalMoments,
};

/// Hoyer index from exact integer sums.
fn hoyer_from_exact(sum: u64, sum_sq: u64, n: u64) -> f64 {
    let root_n = (n as f64).sqrt();
    (root_n - sum as f64 / (sum_sq as f64).sqrt()) / (root_n - 1.0)
}

/// Gini from the mean absolute pairwise difference, O(n^2).
fn gini_pairwise(x: &ImageMatrix) -> f64 {
    let c: Vec<f64> = x.as_slice().iter().map(|v| v.abs()).collect();
    let n = c.len() as f64;
    let total: f64 = c.iter().sum();
    let mut diff = 0.0;
    for a in &c {
        for b in &c {
            diff += (a - b).abs();
        }
    }
    diff / (2.0 * n * total)
}

#[test]
fn staircase_and_band_match_direct_summation() {
    let (mut s_dense, mut q_dense, mut s_sparse, mut q_sparse) = (0u64, 0u64, 0u64, 0u64);
    for _i in 1..=100u64 {
        for j in 1..=200u64 {
            let d = (j - 1) / 50;
            s_dense += d;
            q_dense += d * d;
            let s = if (50..60).contains(&j) { 5 } else { 0 };
            s_sparse += s;
            q_sparse += s * s;
        }
    }
    assert_eq!((s_dense, q_dense, s_sparse, q_sparse), (30000, 70000, 5000, 25000));

    let dense = hoyer_index(&make_dense_anomaly(100, 200).unwrap()).unwrap();
    let sparse = hoyer_index(&make_sparse_anomaly(100, 200).unwrap()).unwrap();
    assert!((dense - hoyer_from_exact(s_dense, q_dense, 20000)).abs() < 1e-9);
    assert!((sparse - hoyer_from_exact(s_sparse, q_sparse, 20000)).abs() < 1e-9);
    assert!((dense - 0.19963).abs() < 5e-6, "dense {dense}");
    assert!((sparse - 0.78192).abs() < 5e-6, "sparse {sparse}");
}

#[test]
fn clean_dense_moments() {
    let a = make_dense_anomaly(100, 200).unwrap();
    for mode in [MomentMode::Literal, MomentMode::Debias] {
        let m = estimate_moments(&a, 0.0, mode).unwrap();
        assert_eq!(m.a_bar, 30000.0 / 20000.0);
        assert_eq!(m.a2_bar, 70000.0 / 20000.0);
        assert_eq!(m.sigma2, 0.0);
    }
}

#[test]
fn debiased_second_moment_recovers_anomaly() {
    let a = make_dense_anomaly(100, 200).unwrap();
    let sigma = 6.0;
    let n = a.len() as f64;
    let mut est = Vec::new();
    for seed in 0..100u64 {
        let r = a.add(&sample_noise(100, 200, &NoiseSpec::new(sigma, 1000 + seed).unwrap()).unwrap()).unwrap();
        let oracle = r.as_slice().iter().map(|v| v * v).sum::<f64>() / n - sigma * sigma;
        let m = estimate_moments(&r, sigma * sigma, MomentMode::Debias).unwrap();
        assert!((m.a2_bar - oracle.max(m.a_bar * m.a_bar)).abs() < 1e-9);
        est.push(m.a2_bar);
    }
    let mean = est.iter().sum::<f64>() / est.len() as f64;
    // per-replicate sd is about 0.37, so the mean of 100 has sd about 0.04
    assert!((mean - 3.5).abs() < 0.15, "mean debiased a2 {mean}");
}

#[test]
fn literal_mode_absorbs_noise_variance() {
    let a = make_dense_anomaly(100, 200).unwrap();
    let r = a.add(&sample_noise(100, 200, &NoiseSpec::new(6.0, 5).unwrap()).unwrap()).unwrap();
    let lit = estimate_moments(&r, 36.0, MomentMode::Literal).unwrap();
    assert!((lit.a2_bar - 39.5).abs() < 1.5);
}

#[test]
fn gini_spike_and_scaling() {
    let mut data = vec![0.0; 100];
    data[17] = 4.0;
    let spike = ImageMatrix::new(10, 10, data).unwrap();
    let g = gini_index(&spike).unwrap();
    assert!((g - gini_pairwise(&spike)).abs() < 1e-12);
    assert!(g > 0.98);
}

#[test]
fn bias_supremum_under_huge_noise() {
    // the gap is exactly a / sqrt(a2 + sigma2), below 1e-6 whenever a < 1
    for (a, a2) in [(0.5, 0.5), (0.3, 1.0), (0.999, 1.0), (0.2, 0.04)] {
        let b = noise_bias(&SignalMoments::new(a, a2, 1e12).unwrap()).unwrap();
        let sup = a / f64::sqrt(a2);
        assert!(b <= sup);
        assert!(sup - b <= 1e-6, "a={a} a2={a2} gap {}", sup - b);
        assert!((sup - b - a / (a2 + 1e12f64).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn bias_monotone_on_grid() {
    for (a, a2) in [(1.5, 3.5), (0.25, 1.25), (1.0, 1.0), (1e-3, 2.0)] {
        let mut prev = 0.0;
        for k in -60..=120 {
            let s2 = 10f64.powf(k as f64 / 10.0);
            let b = noise_bias(&SignalMoments::new(a, a2, s2).unwrap()).unwrap();
            assert!(b >= prev, "not monotone at sigma2={s2}");
            prev = b;
        }
    }
}

#[test]
fn heavy_noise_threshold_arithmetic() {
    let h = hoyer_index(&make_dense_anomaly(100, 200).unwrap()).unwrap();
    let b = noise_bias(&SignalMoments::new(1.5, 3.5, 1e4).unwrap()).unwrap();
    assert!((b - 0.7868).abs() < 1e-4, "bias {b}");
    assert!((h + b - 0.986).abs() < 1e-3);
}

#[test]
fn floor_when_no_anomaly_gives_no_bias() {
    let z = ImageMatrix::zeros(10, 10).unwrap();
    let m = estimate_moments(&z, 4.0, MomentMode::Debias).unwrap();
    assert_eq!(m.a2_bar, a2_floor(4.0));
    assert_eq!(noise_bias(&m).unwrap(), 0.0);
}

fn matrix_strategy(lo: f64, hi: f64) -> impl Strategy<Value = ImageMatrix> {
    (1usize..8, 1usize..8)
        .prop_filter("need two entries", |(r, c)| r * c >= 2)
        .prop_flat_map(move |(r, c)| {
            prop::collection::vec(lo..hi, r * c).prop_map(move |d| ImageMatrix::new(r, c, d).unwrap())
        })
}

fn moments_strategy() -> impl Strategy<Value = SignalMoments> {
    (1e-3f64..10.0, 0.0f64..=1.0, 0.0f64..100.0).prop_map(|(a2, frac, s2)| {
        // a_bar <= sqrt(a2_bar) as for any matrix-derived pair
        SignalMoments::new(frac * a2.sqrt(), a2, s2).unwrap()
    })
}

proptest! {
    #[test]
    fn same_sign_range(x in matrix_strategy(0.0, 1e3)) {
        let h = hoyer_index(&x).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&h), "h = {h}");
    }

    #[test]
    fn signed_sum_range(x in matrix_strategy(-1e3, 1e3)) {
        let n = x.len() as f64;
        let h = hoyer_index(&x).unwrap();
        let upper = n.sqrt() / (n.sqrt() - 1.0);
        prop_assert!(h >= 0.0 && h <= upper + 1e-12, "h = {h}");
    }

    #[test]
    fn scale_and_sign_invariance(x in matrix_strategy(-1e3, 1e3), c in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6]) {
        prop_assume!(!x.is_zero());
        let h = hoyer_index(&x).unwrap();
        let hc = hoyer_index(&x.scale(c).unwrap()).unwrap();
        prop_assert!((h - hc).abs() <= 1e-12 * h.abs().max(1.0), "{h} vs {hc}");
    }

    #[test]
    fn constant_matrix_is_zero(r in 1usize..20, c in 1usize..20, v in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6]) {
        prop_assume!(r * c >= 2);
        let h = hoyer_index(&ImageMatrix::filled(r, c, v).unwrap()).unwrap();
        prop_assert!(h.abs() < 1e-12, "h = {h}");
    }

    #[test]
    fn single_nonzero_is_one(r in 1usize..20, c in 1usize..20, v in prop_oneof![-1e6f64..-1e-6, 1e-6f64..1e6], k in 0usize..400) {
        prop_assume!(r * c >= 2);
        let mut d = vec![0.0; r * c];
        d[k % (r * c)] = v;
        prop_assert_eq!(hoyer_index(&ImageMatrix::new(r, c, d).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn gini_matches_pairwise_oracle(x in matrix_strategy(-50.0, 50.0)) {
        prop_assume!(!x.is_zero());
        let g = gini_index(&x).unwrap();
        prop_assert!((g - gini_pairwise(&x)).abs() < 1e-9);
        let g2 = gini_index(&x.scale(2.0).unwrap()).unwrap();
        prop_assert!((g - g2).abs() < 1e-12);
    }

    #[test]
    fn moment_inequality(x in matrix_strategy(-1e3, 1e3), s2 in 0.0f64..1e4) {
        let n = x.len() as f64;
        let a = x.sum().abs() / n;
        prop_assert!(a * a <= x.frobenius_sq() / n * (1.0 + 1e-12));
        for mode in [MomentMode::Literal, MomentMode::Debias] {
            let m = estimate_moments(&x, s2, mode).unwrap();
            prop_assert!(m.a_bar * m.a_bar <= m.a2_bar);
            prop_assert!(m.a2_bar > 0.0);
        }
    }

    #[test]
    fn bias_bounds_and_difference_form(m in moments_strategy()) {
        let b = noise_bias(&m).unwrap();
        let upper = m.a_bar / m.a2_bar.sqrt();
        prop_assert!(b >= 0.0 && b <= upper * (1.0 + 1e-12));
        let diff_form = upper - m.a_bar / (m.a2_bar + m.sigma2).sqrt();
        prop_assert!((b - diff_form).abs() < 1e-12);
    }

    #[test]
    fn noiseless_correction_is_identity(h in 0.0f64..=1.0, a2 in 1e-3f64..10.0, frac in 0.0f64..=1.0) {
        let m = SignalMoments::new(frac * a2.sqrt(), a2, 0.0).unwrap();
        prop_assert_eq!(corrected_hoyer(h, &m).unwrap(), h);
    }

    #[test]
    fn correction_is_clamped_difference(h in 0.0f64..1.2, m in moments_strategy()) {
        let c = correct(h, &m).unwrap();
        prop_assert_eq!(c.g_unclamped, h - c.bias);
        prop_assert_eq!(c.g, c.g_unclamped.clamp(0.0, 1.0));
    }
}
