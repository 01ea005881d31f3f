//! Utility metrics comparing private outputs against original ones.

use std::collections::HashSet;

use crate::analytics::{Clustering, PccScores};
use crate::error::{dimension, Error, Result};

/// Normalized mutual information `I(a; b) / ((H(a) + H(b)) / 2)` with
/// natural logarithms. Two single-cluster labelings score 1.
pub fn nmi(a: &Clustering, b: &Clustering) -> Result<f64> {
    let n = a.n();
    if n != b.n() {
        return dimension(format!("clusterings cover {} and {} items", n, b.n()));
    }
    let (ka, kb) = (a.k(), b.k());
    let mut table = vec![0usize; ka * kb];
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        table[x * kb + y] += 1;
    }
    let nf = n as f64;
    let entropy = |sizes: &[usize]| -> f64 {
        sizes
            .iter()
            .filter(|&&s| s > 0)
            .map(|&s| {
                let p = s as f64 / nf;
                -p * p.ln()
            })
            .sum()
    };
    let (sa, sb) = (a.sizes(), b.sizes());
    let (ha, hb) = (entropy(&sa), entropy(&sb));
    if ha == 0.0 && hb == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for x in 0..ka {
        for y in 0..kb {
            let c = table[x * kb + y];
            if c > 0 {
                let c = c as f64;
                mi += c / nf * (c * nf / (sa[x] as f64 * sb[y] as f64)).ln();
            }
        }
    }
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

/// `n · MSE = Σ_j (x_j − y_j)²`.
pub fn scaled_mse(x: &PccScores, y: &PccScores) -> Result<f64> {
    if x.len() != y.len() {
        return dimension(format!("score vectors have lengths {} and {}", x.len(), y.len()));
    }
    if x.normalized() != y.normalized() {
        return Err(Error::Usage("cannot compare normalized with unnormalized scores".into()));
    }
    Ok(x.scores().iter().zip(y.scores()).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Percentage of `reference` ids that also appear in `candidate`.
pub fn overlap_percent(reference: &[usize], candidate: &[usize]) -> Result<f64> {
    if reference.len() != candidate.len() {
        return dimension(format!(
            "top lists have lengths {} and {}",
            reference.len(),
            candidate.len()
        ));
    }
    if reference.is_empty() {
        return Err(Error::Domain("top lists must be non-empty".into()));
    }
    let set: HashSet<usize> = reference.iter().copied().collect();
    let shared = candidate.iter().collect::<HashSet<_>>().into_iter().filter(|c| set.contains(c)).count();
    Ok(100.0 * shared as f64 / reference.len() as f64)
}
