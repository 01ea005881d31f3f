mod common;

use common::median;
use rpdp::analytics::{scores_from_private_basis, spectral_cluster};
use rpdp::experiment::Pipeline;
use rpdp::{
    gen_sbm, lnpp_publish, nmi, private_pcc_scores, publish, run_experiment, top_t,
    topk_eigen_symmetric, ExperimentPlan, LnppConfig, PccMode, PrivacyParams, ProjectionConfig, SparseGraph,
};

#[test]
fn disconnected_blocks_are_recovered_exactly() {
    let (g, planted) = gen_sbm(&[500, 500], 1.0, 0.0, 0).unwrap();
    let b = topk_eigen_symmetric::<f64>(&g, 2, 1e-10, 400, 0).unwrap();
    let c = spectral_cluster(&b, 2, 0).unwrap();
    assert_eq!(nmi(&c, &planted).unwrap(), 1.0);
}

#[test]
fn original_pipeline_finds_planted_blocks() {
    let scores: Vec<f64> = (0..10)
        .map(|seed| {
            let (g, planted) = gen_sbm(&[500, 500], 0.05, 0.005, seed).unwrap();
            let b = topk_eigen_symmetric::<f64>(&g, 2, 1e-10, 400, seed).unwrap();
            nmi(&spectral_cluster(&b, 2, seed).unwrap(), &planted).unwrap()
        })
        .collect();
    assert!(median(scores.clone()) >= 0.95, "{scores:?}");
}

#[test]
fn self_contained_scores_are_exact_on_an_exact_basis() {
    // with the true eigenpairs, ‖(AU)_j‖ = sqrt(Σ λ_i² U_ji²), so the two
    // modes coincide; a projected basis only approximates this
    for i in [0u64, 2, 5] {
        let g = common::mixed_graph(i);
        let b = topk_eigen_symmetric::<f64>(&g, 3, 1e-12, 400, i).unwrap();
        let eval = scores_from_private_basis(&b, PccMode::Evaluation(Some(&g)), true).unwrap();
        let own = scores_from_private_basis(&b, PccMode::SelfContained, true).unwrap();
        for j in 0..g.n() {
            assert!((eval.scores()[j] - own.scores()[j]).abs() < 1e-9, "graph {i} node {j}");
        }
        assert_eq!(top_t(&eval, 10).unwrap(), top_t(&own, 10).unwrap());
    }
}

#[test]
fn evaluation_mode_needs_a_graph() {
    let g = SparseGraph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
    let cfg = ProjectionConfig { m: 3, seed: 1, noise_seed: 2 };
    let p = publish::<f64>(&g, &cfg, &PrivacyParams::uncalibrated(0.1).unwrap()).unwrap();
    let err = private_pcc_scores(&p, 2, PccMode::Evaluation(None), true, 1e-8).unwrap_err();
    assert!(matches!(err, rpdp::Error::Usage(_)));
}

#[test]
fn lnpp_utility_falls_with_noise_scale() {
    let (g, planted) = gen_sbm(&[500, 500], 0.05, 0.005, 11).unwrap();
    let basis = topk_eigen_symmetric::<f64>(&g, 2, 1e-10, 400, 0).unwrap();
    let mut medians = Vec::new();
    for b in [0.01, 0.1, 1.0] {
        let scores: Vec<f64> = (0..10)
            .map(|seed| {
                let noisy = lnpp_publish(&basis, &LnppConfig { k: 2, laplace_scale: b, seed }).unwrap();
                nmi(&spectral_cluster(&noisy, 2, seed).unwrap(), &planted).unwrap()
            })
            .collect();
        medians.push(median(scores));
    }
    assert!(medians[0] >= medians[1] && medians[1] >= medians[2], "{medians:?}");
    assert!(medians[2] < 0.05, "{medians:?}");
}

#[test]
fn noiseless_grid_matches_original_consistency() {
    let (g, planted) = gen_sbm(&[200, 200], 0.3, 0.02, 3).unwrap();
    let mut plan = ExperimentPlan::new("sbm");
    plan.ms = vec![150];
    plan.sigmas = vec![0.0];
    plan.ks = vec![2];
    plan.ts = vec![10, 100];
    plan.seeds = (0..5).collect();
    let reports = run_experiment(&g, &plan, Some(&planted)).unwrap();
    assert_eq!(reports.len(), 1 + 5);
    let consistency = reports[0].nmi.unwrap();
    let private = median(reports[1..].iter().map(|r| r.nmi.unwrap()).collect());
    assert!((private - consistency).abs() <= 0.02, "{private} vs {consistency}");
    for r in &reports[1..] {
        assert_eq!(r.pipeline, Pipeline::RandomProjection);
        assert_eq!(r.overlaps.len(), 2);
        assert!(r.overlaps.iter().all(|&(_, p)| (0.0..=100.0).contains(&p)));
        assert!((0.0..=1.0).contains(&r.nmi.unwrap()));
    }
}

#[test]
fn dense_communities_survive_unit_noise() {
    // a denser SBM than the sparse desk-scale one: eigengap far above the
    // sketch error, so σ = 1 barely hurts
    let (g, planted) = gen_sbm(&[500, 500, 500, 500], 0.3, 0.01, 7).unwrap();
    let mut plan = ExperimentPlan::new("dense-sbm");
    plan.ms = vec![200];
    plan.sigmas = vec![1.0];
    plan.ks = vec![4];
    plan.ts = vec![100];
    plan.seeds = (0..3).collect();
    let reports = run_experiment(&g, &plan, Some(&planted)).unwrap();
    let cells = &reports[1..];
    assert!(cells.iter().all(|r| r.error.is_none()));
    assert!(median(cells.iter().map(|r| r.nmi_planted.unwrap()).collect()) >= 0.9);
    assert!(median(cells.iter().map(|r| r.overlaps[0].1).collect()) >= 70.0);
    assert!(median(cells.iter().map(|r| r.n_mse.unwrap()).collect()) <= 0.01);
}

#[test]
fn reports_are_repeatable() {
    let (g, planted) = gen_sbm(&[60, 60], 0.4, 0.02, 1).unwrap();
    let mut plan = ExperimentPlan::new("toy");
    plan.ms = vec![20];
    plan.sigmas = vec![0.1, 1.0];
    plan.lnpp_scales = vec![0.1];
    plan.ts = vec![10];
    plan.seeds = vec![4, 5];
    let a = run_experiment(&g, &plan, Some(&planted)).unwrap();
    let b = run_experiment(&g, &plan, Some(&planted)).unwrap();
    let mut ta = Vec::new();
    let mut tb = Vec::new();
    rpdp::experiment::write_reports_csv(&mut ta, &a, false).unwrap();
    rpdp::experiment::write_reports_csv(&mut tb, &b, false).unwrap();
    assert_eq!(ta, tb);
    assert_eq!(a.len(), 1 + 3 * 2);
}
