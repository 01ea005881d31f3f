mod common;

use common::median;
use rpdp::baseline::lnpp_noise;
use rpdp::publisher::{min_calibrated_width, publish_with_diagnostics, row_norm_bound, sigma_requirement};
use rpdp::rng::Stream;
use rpdp::{
    calibrate_sigma, publish, row_norm_bound_check, sample_projection, Basis, BasisSource, LnppConfig, Matrix,
    PrivacyParams, ProjectionConfig, SparseGraph,
};

/// (ε, δ, n, σ) with σ evaluated at 200-bit precision from the exact binary
/// values of ε and δ, then rounded to the nearest double.
const SIGMA_ORACLE: &[(f64, f64, usize, f64)] = &[
    (0.1, 1e-06, 2, 437.99400080041795),
    (0.1, 0.01, 1000, 214.91887265952258),
    (0.1, 0.05, 10000, 171.24873191400042),
    (0.1, 0.3, 2000, 73.33650813362962),
    (0.5, 1e-06, 3000000, 125.11842485214231),
    (0.5, 0.01, 2, 30.57861874661405),
    (0.5, 0.05, 1000, 33.319883903393084),
    (0.5, 0.3, 10000, 20.520287144706298),
    (1.0, 1e-06, 2000, 54.995487712520294),
    (1.0, 0.01, 3000000, 30.964369269520912),
    (1.0, 0.05, 2, 11.037589544374578),
    (1.0, 0.3, 1000, 11.07041401271155),
    (2.0, 1e-06, 10000, 29.504460884606203),
    (2.0, 0.01, 2000, 13.431547033597953),
    (2.0, 0.05, 3000000, 13.879722228650415),
    (2.0, 0.3, 2, 3.4508468052820094),
    (5.0, 1e-06, 1000, 12.256501195099553),
    (5.0, 0.01, 10000, 7.017810140615463),
    (5.0, 0.05, 2000, 5.5635537864861275),
    (5.0, 0.3, 3000000, 5.9606715903365215),
];

fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

#[test]
fn calibration_within_one_ulp_of_extended_precision() {
    for &(eps, delta, n, want) in SIGMA_ORACLE {
        let got = calibrate_sigma(eps, delta, n).unwrap();
        assert!(ulps(got, want) <= 1, "eps={eps} delta={delta} n={n}: {got} vs {want}");
    }
    // ε = 1, δ = 0.01, n = 10⁴ reduces to sqrt(10 (1 + ln 50) ln 10⁶)
    assert!(ulps(calibrate_sigma(1.0, 0.01, 10_000).unwrap(), 26.050356176539307) <= 1);
}

#[test]
fn projection_moments() {
    let (n, m) = (10_000, 100);
    let p: Matrix = sample_projection(n, m, 42).unwrap();
    let count = (n * m) as f64;
    let mean = p.as_slice().iter().sum::<f64>() / count;
    let var = p.as_slice().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
    assert!(mean.abs() <= 4.0 / ((m * n * m) as f64).sqrt(), "mean {mean}");
    assert!((var * m as f64 - 1.0).abs() <= 0.05, "variance {var}");
    assert_eq!(p, sample_projection::<f64>(n, m, 42).unwrap());
}

#[test]
fn row_norm_bound_holds_in_most_trials() {
    let ok = (0..200u64)
        .filter(|&s| row_norm_bound_check(&sample_projection::<f64>(5000, 50, s).unwrap(), 0.05).ok)
        .count();
    assert!(ok >= 190, "{ok}/200");
}

#[test]
fn empty_graph_publication_is_pure_noise() {
    let n = 5000;
    let g = SparseGraph::from_edges(n, std::iter::empty()).unwrap();
    let cfg = ProjectionConfig { m: 16, seed: 1, noise_seed: 2 };
    let p = publish::<f64>(&g, &cfg, &PrivacyParams::uncalibrated(1.0).unwrap()).unwrap();
    for j in 0..16 {
        let col = p.data().column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((var - 1.0).abs() <= 0.1, "column {j}: {var}");
    }
}

#[test]
fn calibrated_noise_covers_sensitivity() {
    // with σ calibrated and m above the width floor, σ must dominate the
    // per-projection requirement in at least a (1 − δ) share of draws
    let (n, delta, eps) = (2000, 0.05, 1.0);
    let m = 64;
    assert!(m >= min_calibrated_width(n, delta));
    let privacy = PrivacyParams::calibrated(eps, delta, n).unwrap();
    let g = rpdp::gen_preferential_attachment(n, 3, 5).unwrap();
    let covered = (0..500u64)
        .filter(|&s| {
            let cfg = ProjectionConfig { m, seed: s, noise_seed: s + 1 };
            let out = publish_with_diagnostics::<f64>(&g, &cfg, &privacy).unwrap();
            privacy.sigma >= sigma_requirement(out.row_norms.w2_squared.sqrt(), eps, delta)
        })
        .count();
    assert!(covered as f64 >= (1.0 - delta) * 500.0, "{covered}/500");
    assert!((row_norm_bound(n, m, delta) - 1.0) > 0.0);
}

#[test]
fn laplace_noise_moments() {
    let n = 25_000;
    let k = 4;
    let vectors = Matrix::from_fn(n, k, |r, c| if r == c { 1.0 } else { 0.0 });
    let basis = Basis::new(vectors.clone(), vec![4.0, 3.0, 2.0, 1.0], BasisSource::Original).unwrap();
    for b in [0.05, 1.0] {
        let noisy = lnpp_noise(&basis, &LnppConfig { k, laplace_scale: b, seed: 9 }).unwrap();
        let diffs: Vec<f64> = noisy.as_slice().iter().zip(vectors.as_slice()).map(|(x, y)| x - y).collect();
        let count = diffs.len() as f64;
        let mean = diffs.iter().sum::<f64>() / count;
        let mad = diffs.iter().map(|d| (d - mean).abs()).sum::<f64>() / count;
        // Laplace(0, b) has standard deviation b·√2
        assert!(mean.abs() <= 4.0 * b * 2f64.sqrt() / count.sqrt(), "b={b}: mean {mean}");
        assert!((mad / b - 1.0).abs() <= 0.05, "b={b}: mad {mad}");
    }
}

#[test]
fn ba_degree_tail_decreases() {
    let mut slopes = Vec::new();
    for seed in 0..5 {
        let g = rpdp::gen_preferential_attachment(10_000, 8, seed).unwrap();
        let ratio = g.edge_count() as f64 / 10_000.0;
        assert!((7.0..=9.0).contains(&ratio), "{ratio}");
        let slope = rpdp::degree_distribution(&g).log_log_slope(8, 100).unwrap();
        assert!(slope < 0.0, "seed {seed}: {slope}");
        slopes.push(slope);
    }
    assert!(median(slopes) < -1.0);
}

#[test]
fn standard_normal_tail_frequencies() {
    let mut s = Stream::new(2024);
    let draws = 400_000;
    let beyond = (0..draws).filter(|_| s.standard_normal().abs() > 1.959_963_984_540_054).count() as f64;
    let share = beyond / draws as f64;
    assert!((share - 0.05).abs() < 4.0 * (0.05f64 * 0.95 / draws as f64).sqrt(), "{share}");
}
