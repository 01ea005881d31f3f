//! Principal component centrality: `C = sqrt(((A U) ⊙ (A U)) 1)`.

use serde::Serialize;

use crate::error::{dimension, domain, Error, Result};
use crate::graph::{spmm, SparseGraph};
use crate::publisher::PublishedMatrix;
use crate::scalar::Scalar;
use crate::spectral::{topk_left_singular, EigenBasis};

/// Non-negative per-node scores.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PccScores {
    scores: Vec<f64>,
    k_used: usize,
    normalized: bool,
}

impl PccScores {
    /// Wraps raw scores, rescaling them to unit norm when `normalize` is set
    /// (an all-zero vector stays zero).
    pub fn new(mut scores: Vec<f64>, k_used: usize, normalize: bool) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return domain(format!("scores must be finite and non-negative, found {bad}"));
        }
        if normalize {
            let norm = scores.iter().map(|s| s * s).sum::<f64>().sqrt();
            if norm > 0.0 {
                scores.iter_mut().for_each(|s| *s /= norm);
            }
        }
        Ok(Self {
            scores,
            k_used,
            normalized: normalize,
        })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn k_used(&self) -> usize {
        self.k_used
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn row_norms<T: Scalar>(y: &crate::dense::DenseMatrix<T>) -> Vec<f64> {
    (0..y.rows())
        .map(|i| y.row(i).iter().map(|v| v.as_f64() * v.as_f64()).sum::<f64>().sqrt())
        .collect()
}

/// Scores from the original graph and any n-row basis: row norms of `A·U`.
pub fn pcc_scores<T: Scalar>(g: &SparseGraph, basis: &EigenBasis<T>, normalize: bool) -> Result<PccScores> {
    if basis.n() != g.n() {
        return dimension(format!("basis has {} rows, graph has {} nodes", basis.n(), g.n()));
    }
    let y = spmm(g, basis.vectors())?;
    PccScores::new(row_norms(&y), basis.k(), normalize)
}

/// How [`private_pcc_scores`] turns the recovered basis into scores.
#[derive(Clone, Copy, Debug)]
pub enum PccMode<'a> {
    /// Uses only published data: `score_j = sqrt(Σ_i (ŝ_i Û_{j,i})²)`, the
    /// row norms of the rank-k reconstruction `Û diag(ŝ) Ûᵀ` applied to `Û`.
    /// `ŝ_i` already estimates `|λ_i|` because `E[P Pᵀ] = I`.
    SelfContained,
    /// Applies the original graph to the recovered basis. The graph must be
    /// supplied.
    Evaluation(Option<&'a SparseGraph>),
}

/// Scores from a published matrix via its top-`k` left singular basis.
pub fn private_pcc_scores<T: Scalar>(
    published: &PublishedMatrix<T>,
    k: usize,
    mode: PccMode<'_>,
    normalize: bool,
    tol: f64,
) -> Result<PccScores> {
    if let PccMode::Evaluation(None) = mode {
        return Err(Error::Usage("evaluation mode needs the original graph".into()));
    }
    let basis = topk_left_singular(published, k, tol)?;
    scores_from_private_basis(&basis, mode, normalize)
}

/// The second half of [`private_pcc_scores`], for callers that already
/// hold the recovered basis.
pub fn scores_from_private_basis<T: Scalar>(
    basis: &EigenBasis<T>,
    mode: PccMode<'_>,
    normalize: bool,
) -> Result<PccScores> {
    match mode {
        PccMode::Evaluation(None) => Err(Error::Usage("evaluation mode needs the original graph".into())),
        PccMode::Evaluation(Some(g)) => pcc_scores(g, basis, normalize),
        PccMode::SelfContained => {
            let u = basis.vectors();
            let s = basis.values();
            let scores = (0..u.rows())
                .map(|j| {
                    u.row(j)
                        .iter()
                        .zip(s)
                        .map(|(&x, &l)| (l * x).as_f64().powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect();
            PccScores::new(scores, basis.k(), normalize)
        }
    }
}

/// Indices of the `t` largest scores, largest first; ties go to the
/// smaller index.
pub fn top_t(scores: &PccScores, t: usize) -> Result<Vec<usize>> {
    let n = scores.len();
    if t == 0 || t > n {
        return domain(format!("need 1 <= t <= n, got t={t}, n={n}"));
    }
    let s = scores.scores();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    idx.truncate(t);
    Ok(idx)
}
