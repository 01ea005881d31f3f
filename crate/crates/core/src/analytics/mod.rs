//! Spectral clustering and principal component centrality.

mod kmeans;
mod pcc;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::scalar::Scalar;
use crate::spectral::EigenBasis;

pub use kmeans::{kmeans, KMeansOptions, KMeansResult};
pub use pcc::{pcc_scores, private_pcc_scores, scores_from_private_basis, top_t, PccMode, PccScores};

/// Assignment of `n` items to clusters `0..k`. Clusters may be empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clustering {
    labels: Vec<usize>,
    k: usize,
}

impl Clustering {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return domain("a clustering needs k >= 1");
        }
        if labels.len() < k {
            return domain(format!("{} items cannot fill k={k} clusters", labels.len()));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return domain(format!("label {bad} out of range for k={k}"));
        }
        Ok(Self { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Ids of clusters with no members.
    pub fn empty_clusters(&self) -> Vec<usize> {
        self.sizes()
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 0)
            .map(|(c, _)| c)
            .collect()
    }
}

/// k-means on the rows of the first `k` basis vectors with default options.
pub fn spectral_cluster<T: Scalar>(basis: &EigenBasis<T>, k: usize, seed: u64) -> Result<Clustering> {
    spectral_cluster_with(basis, k, &KMeansOptions::new(seed))
}

pub fn spectral_cluster_with<T: Scalar>(
    basis: &EigenBasis<T>,
    k: usize,
    opts: &KMeansOptions,
) -> Result<Clustering> {
    if k == 0 || k > basis.k() {
        return domain(format!("need 1 <= k <= {} basis columns, got k={k}", basis.k()));
    }
    let points = basis.vectors().leading_columns(k);
    kmeans(&points, k, opts).map(|r| r.clustering)
}
