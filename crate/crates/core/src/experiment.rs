//! Parameter sweeps comparing private pipelines against the original one.
//!
//! For every `k` the original pipeline is run once: a Lanczos basis, its PCC
//! scores, and `repeats` k-means clusterings whose mean pairwise NMI is the
//! consistency reference. Each grid cell and seed then produces one
//! [`EvalReport`]: its NMI is the mean over all `repeats × repeats` pairs of
//! private and original clusterings.

use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{pcc_scores, scores_from_private_basis, spectral_cluster_with, top_t};
use crate::analytics::{Clustering, KMeansOptions, PccMode, PccScores};
use crate::baseline::{lnpp_publish, LnppConfig};
use crate::error::{domain, Result};
use crate::graph::SparseGraph;
use crate::metrics::{nmi, overlap_percent, scaled_mse};
use crate::publisher::{publish, PrivacyParams, ProjectionConfig};
use crate::rng::derive_seed;
use crate::spectral::{
    eigen_error, theorem2_bound, topk_eigen_symmetric, topk_left_singular, EigenBasis, ErrorBoundReport,
    LanczosOptions, TailEnergy,
};

/// Which scores the private PCC pipelines compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PccPolicy {
    Evaluation,
    SelfContained,
}

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub dataset: String,
    pub ms: Vec<usize>,
    pub sigmas: Vec<f64>,
    pub ks: Vec<usize>,
    pub ts: Vec<usize>,
    /// Laplace scales of the LNPP baseline; empty skips it.
    pub lnpp_scales: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Seed of the original pipeline.
    pub base_seed: u64,
    /// Clusterings per pipeline in the pairwise protocol.
    pub repeats: usize,
    pub kmeans_max_iter: usize,
    pub kmeans_restarts: usize,
    pub normalize_pcc: bool,
    pub pcc: PccPolicy,
    pub eigen_tol: f64,
    pub svd_tol: f64,
}

impl ExperimentPlan {
    pub fn new(dataset: impl Into<String>) -> Self {
        Self {
            dataset: dataset.into(),
            ms: vec![20, 200],
            sigmas: vec![0.1, 0.5, 1.0],
            ks: vec![2],
            ts: vec![10, 100],
            lnpp_scales: Vec::new(),
            seeds: vec![0],
            base_seed: 0,
            repeats: 5,
            kmeans_max_iter: 100,
            kmeans_restarts: 5,
            normalize_pcc: true,
            pcc: PccPolicy::Evaluation,
            eigen_tol: 1e-10,
            svd_tol: 1e-8,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.ks.is_empty() || self.ks.iter().any(|&k| k == 0 || k + 1 >= n) {
            return domain(format!("every k must satisfy 1 <= k < n - 1, got {:?}", self.ks));
        }
        if self.ts.iter().any(|&t| t == 0 || t > n) {
            return domain(format!("every t must satisfy 1 <= t <= n, got {:?}", self.ts));
        }
        if self.repeats == 0 || self.seeds.is_empty() {
            return domain("need at least one repeat and one seed");
        }
        if self.ms.is_empty() && self.lnpp_scales.is_empty() {
            return domain("the grid has no private pipeline");
        }
        Ok(())
    }

    fn kmeans(&self, seed: u64) -> KMeansOptions {
        KMeansOptions {
            seed,
            max_iter: self.kmeans_max_iter,
            restarts: self.kmeans_restarts,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Original,
    RandomProjection,
    Lnpp,
}

impl Pipeline {
    pub fn as_str(self) -> &'static str {
        match self {
            Pipeline::Original => "original",
            Pipeline::RandomProjection => "random-projection",
            Pipeline::Lnpp => "lnpp",
        }
    }
}

/// Wall-clock seconds per stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub publish: f64,
    pub eigen: f64,
    pub cluster: f64,
    pub pcc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub dataset: String,
    pub n: usize,
    pub pipeline: Pipeline,
    pub m: Option<usize>,
    pub sigma: Option<f64>,
    pub laplace_scale: Option<f64>,
    pub k: usize,
    pub seed: u64,
    /// Mean NMI against the original clusterings (for the original
    /// pipeline: mean pairwise NMI among its own clusterings).
    pub nmi: Option<f64>,
    /// Mean NMI against planted labels, when known.
    pub nmi_planted: Option<f64>,
    pub n_mse: Option<f64>,
    /// `(t, percent)` top-t overlap with the original ranking.
    pub overlaps: Vec<(usize, f64)>,
    pub er_report: Option<ErrorBoundReport>,
    pub timings: Timings,
    /// `n·m·8` (or `n·k·8` for bases) plus the graph's bytes.
    pub peak_memory_estimate: usize,
    pub error: Option<String>,
}

struct OriginalStage {
    k: usize,
    basis: EigenBasis<f64>,
    clusterings: Vec<Clustering>,
    scores: PccScores,
    tops: Vec<(usize, Vec<usize>)>,
    report: EvalReport,
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (s, c) = v.into_iter().fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    s / c as f64
}

fn cross_nmi(a: &[Clustering], b: &[Clustering]) -> Result<f64> {
    let mut all = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            all.push(nmi(x, y)?);
        }
    }
    Ok(mean(all))
}

fn planted_nmi(cs: &[Clustering], planted: Option<&Clustering>) -> Result<Option<f64>> {
    planted
        .map(|p| cs.iter().map(|c| nmi(c, p)).collect::<Result<Vec<_>>>().map(mean))
        .transpose()
}

fn tops(scores: &PccScores, ts: &[usize]) -> Result<Vec<(usize, Vec<usize>)>> {
    ts.iter().map(|&t| Ok((t, top_t(scores, t)?))).collect()
}

/// Runs the whole grid on `g`. Failures inside a cell are recorded in that
/// cell's report; failures of the original pipeline abort the run.
pub fn run_experiment(g: &SparseGraph, plan: &ExperimentPlan, planted: Option<&Clustering>) -> Result<Vec<EvalReport>> {
    let n = g.n();
    plan.validate(n)?;
    if let Some(p) = planted {
        if p.n() != n {
            return domain(format!("planted labels cover {} nodes, graph has {n}", p.n()));
        }
    }
    let k_max = *plan.ks.iter().max().expect("validated");
    let started = Instant::now();
    let eig_k = (k_max + 1).min(n - 1);
    let mut opts = LanczosOptions::new(eig_k, plan.base_seed);
    opts.tol = plan.eigen_tol;
    let full = topk_eigen_symmetric::<f64>(g, eig_k, opts.tol, opts.max_iter, opts.seed)?;
    let eigen_secs = started.elapsed().as_secs_f64();

    let mut originals = Vec::new();
    for &k in &plan.ks {
        let started = Instant::now();
        let basis = full.truncate(k)?;
        let clusterings = (0..plan.repeats)
            .map(|r| spectral_cluster_with(&basis, k, &plan.kmeans(derive_seed(plan.base_seed, &[1, k as u64, r as u64]))))
            .collect::<Result<Vec<_>>>()?;
        let cluster_secs = started.elapsed().as_secs_f64();
        let started = Instant::now();
        let scores = pcc_scores(g, &basis, plan.normalize_pcc)?;
        let tops = tops(&scores, &plan.ts)?;
        let pcc_secs = started.elapsed().as_secs_f64();
        let pairs: Vec<f64> = (0..clusterings.len())
            .flat_map(|i| (i + 1..clusterings.len()).map(move |j| (i, j)))
            .map(|(i, j)| nmi(&clusterings[i], &clusterings[j]))
            .collect::<Result<_>>()?;
        let consistency = if pairs.is_empty() { 1.0 } else { mean(pairs) };
        let report = EvalReport {
            dataset: plan.dataset.clone(),
            n,
            pipeline: Pipeline::Original,
            m: None,
            sigma: None,
            laplace_scale: None,
            k,
            seed: plan.base_seed,
            nmi: Some(consistency),
            nmi_planted: planted_nmi(&clusterings, planted)?,
            n_mse: Some(0.0),
            overlaps: plan.ts.iter().map(|&t| (t, 100.0)).collect(),
            er_report: None,
            timings: Timings {
                publish: 0.0,
                eigen: eigen_secs,
                cluster: cluster_secs,
                pcc: pcc_secs,
            },
            peak_memory_estimate: g.memory_bytes() + n * eig_k * 8,
            error: None,
        };
        originals.push(OriginalStage {
            k,
            basis,
            clusterings,
            scores,
            tops,
            report,
        });
    }

    #[derive(Clone, Copy)]
    enum Cell {
        Projection { m: usize, sigma: f64 },
        Lnpp { b: f64 },
    }
    let mut cells = Vec::new();
    for &m in &plan.ms {
        for &sigma in &plan.sigmas {
            for o in 0..originals.len() {
                cells.push((Cell::Projection { m, sigma }, o));
            }
        }
    }
    for &b in &plan.lnpp_scales {
        for o in 0..originals.len() {
            cells.push((Cell::Lnpp { b }, o));
        }
    }
    let jobs: Vec<(usize, Cell, usize, u64)> = cells
        .iter()
        .enumerate()
        .flat_map(|(idx, &(cell, o))| plan.seeds.iter().map(move |&s| (idx, cell, o, s)))
        .collect();

    let cell_reports: Vec<EvalReport> = jobs
        .into_par_iter()
        .map(|(idx, cell, o, seed)| {
            let orig = &originals[o];
            let k = orig.k;
            let tags = |t: u64| derive_seed(seed, &[idx as u64, t]);
            let mut report = EvalReport {
                dataset: plan.dataset.clone(),
                n,
                pipeline: Pipeline::RandomProjection,
                m: None,
                sigma: None,
                laplace_scale: None,
                k,
                seed,
                nmi: None,
                nmi_planted: None,
                n_mse: None,
                overlaps: Vec::new(),
                er_report: None,
                timings: Timings::default(),
                peak_memory_estimate: g.memory_bytes(),
                error: None,
            };
            let outcome = (|| -> Result<()> {
                let basis = match cell {
                    Cell::Projection { m, sigma } => {
                        report.m = Some(m);
                        report.sigma = Some(sigma);
                        report.peak_memory_estimate += n * m * 8;
                        let started = Instant::now();
                        let cfg = ProjectionConfig {
                            m,
                            seed: tags(0),
                            noise_seed: tags(1),
                        };
                        let published = publish::<f64>(g, &cfg, &PrivacyParams::uncalibrated(sigma)?)?;
                        report.timings.publish = started.elapsed().as_secs_f64();
                        let started = Instant::now();
                        let basis = topk_left_singular(&published, k, plan.svd_tol)?;
                        report.timings.eigen = started.elapsed().as_secs_f64();
                        let values: Vec<f64> = full.values().to_vec();
                        let bound = theorem2_bound(sigma, n, &values, k, TailEnergy::FromFrobenius(g.frobenius_sq()), Some(m))?;
                        report.er_report = Some(bound.with_observed(eigen_error(&orig.basis, &basis)?));
                        basis
                    }
                    Cell::Lnpp { b } => {
                        report.pipeline = Pipeline::Lnpp;
                        report.laplace_scale = Some(b);
                        report.peak_memory_estimate += n * k * 8;
                        let started = Instant::now();
                        let cfg = LnppConfig {
                            k,
                            laplace_scale: b,
                            seed: tags(2),
                        };
                        let basis = lnpp_publish(&orig.basis, &cfg)?;
                        report.timings.publish = started.elapsed().as_secs_f64();
                        basis
                    }
                };
                let started = Instant::now();
                let private = (0..plan.repeats)
                    .map(|r| spectral_cluster_with(&basis, k, &plan.kmeans(derive_seed(tags(3), &[r as u64]))))
                    .collect::<Result<Vec<_>>>()?;
                report.nmi = Some(cross_nmi(&private, &orig.clusterings)?);
                report.nmi_planted = planted_nmi(&private, planted)?;
                report.timings.cluster = started.elapsed().as_secs_f64();

                let started = Instant::now();
                let mode = match (plan.pcc, cell) {
                    (PccPolicy::SelfContained, Cell::Projection { .. }) => PccMode::SelfContained,
                    _ => PccMode::Evaluation(Some(g)),
                };
                let scores = scores_from_private_basis(&basis, mode, plan.normalize_pcc)?;
                report.n_mse = Some(scaled_mse(&orig.scores, &scores)?);
                for (t, reference) in &orig.tops {
                    report.overlaps.push((*t, overlap_percent(reference, &top_t(&scores, *t)?)?));
                }
                report.timings.pcc = started.elapsed().as_secs_f64();
                Ok(())
            })();
            if let Err(e) = outcome {
                report.error = Some(e.to_string());
            }
            report
        })
        .collect();

    let mut out: Vec<EvalReport> = originals.into_iter().map(|o| o.report).collect();
    out.extend(cell_reports);
    Ok(out)
}

pub const CSV_HEADER: &str = "dataset,n,m,sigma,k,t,pipeline,seed,nmi,n_mse,overlap_t,er2,bound,secs_publish,secs_eigen,secs_cluster,mem_bytes,nmi_planted,laplace_scale,error";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One line per report and `t` (one line with empty `t` when there are no
/// overlaps). Timing columns stay empty unless `timings` is set, so reruns
/// produce identical bytes.
pub fn write_reports_csv<W: Write>(mut w: W, reports: &[EvalReport], timings: bool) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in reports {
        let rows: Vec<(Option<usize>, Option<f64>)> = if r.overlaps.is_empty() {
            vec![(None, None)]
        } else {
            r.overlaps.iter().map(|&(t, p)| (Some(t), Some(p))).collect()
        };
        let secs = |v: f64| if timings { v.to_string() } else { String::new() };
        for (t, overlap) in rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                csv_field(&r.dataset),
                r.n,
                opt(r.m),
                opt(r.sigma),
                r.k,
                opt(t),
                r.pipeline.as_str(),
                r.seed,
                opt(r.nmi),
                opt(r.n_mse),
                opt(overlap),
                opt(r.er_report.and_then(|e| e.er_squared)),
                opt(r.er_report.map(|e| e.bound)),
                secs(r.timings.publish),
                secs(r.timings.eigen),
                secs(r.timings.cluster),
                r.peak_memory_estimate,
                opt(r.nmi_planted),
                opt(r.laplace_scale),
                csv_field(r.error.as_deref().unwrap_or("")),
            )?;
        }
    }
    w.flush()
}

/// One JSON object per report. Timings are zeroed unless `timings` is set.
pub fn write_reports_jsonl<W: Write>(mut w: W, reports: &[EvalReport], timings: bool) -> io::Result<()> {
    for r in reports {
        let mut r = r.clone();
        if !timings {
            r.timings = Timings::default();
        }
        serde_json::to_writer(&mut w, &r)?;
        writeln!(w)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_sbm;

    #[test]
    fn small_grid_shape() {
        let (g, planted) = gen_sbm(&[40, 40], 0.9, 0.0, 1).unwrap();
        let mut plan = ExperimentPlan::new("toy");
        plan.ms = vec![10, 20];
        plan.sigmas = vec![0.0];
        plan.ks = vec![2];
        plan.ts = vec![5, 10];
        plan.lnpp_scales = vec![0.5];
        plan.seeds = vec![1, 2];
        plan.repeats = 2;
        let reports = run_experiment(&g, &plan, Some(&planted)).unwrap();
        // 1 original + (2 m x 1 sigma + 1 lnpp) x 2 seeds
        assert_eq!(reports.len(), 7);
        assert!(reports.iter().all(|r| r.error.is_none()), "{reports:?}");
        assert_eq!(reports[0].pipeline, Pipeline::Original);
        let nmi_orig = reports[0].nmi_planted.unwrap();
        assert!(nmi_orig > 0.99);
        for r in &reports[1..5] {
            assert!(r.nmi.unwrap() > 0.9 || r.m == Some(10), "{r:?}");
            assert!(r.er_report.unwrap().er_squared.is_some());
        }
        let mut a = Vec::new();
        write_reports_csv(&mut a, &reports, false).unwrap();
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 1 + 7 * 2);
        let again = run_experiment(&g, &plan, Some(&planted)).unwrap();
        let mut b = Vec::new();
        write_reports_csv(&mut b, &again, false).unwrap();
        assert_eq!(text.as_bytes(), &b[..]);
    }

    #[test]
    fn cell_failures_are_recorded() {
        let (g, _) = gen_sbm(&[10, 10], 0.8, 0.1, 3).unwrap();
        let mut plan = ExperimentPlan::new("toy");
        plan.ms = vec![2];
        plan.sigmas = vec![0.0];
        plan.ks = vec![3];
        plan.ts = vec![];
        plan.repeats = 1;
        let reports = run_experiment(&g, &plan, None).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports[1].error.is_some());
    }
}
