//! Lloyd's algorithm with k-means++ seeding and restarts.

use rayon::prelude::*;

use super::Clustering;
use crate::dense::DenseMatrix;
use crate::error::{domain, Result};
use crate::rng::Stream;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KMeansOptions {
    pub seed: u64,
    pub max_iter: usize,
    pub restarts: usize,
}

impl KMeansOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            max_iter: 100,
            restarts: 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct KMeansResult {
    pub clustering: Clustering,
    /// Within-cluster sum of squares of the returned clustering.
    pub wcss: f64,
    /// WCSS after each Lloyd iteration of the winning restart.
    pub history: Vec<f64>,
    pub iterations: usize,
}

/// Clusters the rows of `points` into `k` groups.
///
/// Each restart seeds centers with k-means++ and runs Lloyd iterations
/// until the assignment stops changing or `max_iter` is reached. The
/// restart with the smallest WCSS wins (earliest on ties). Distance ties
/// go to the lower center index. When there are fewer than `k` distinct
/// points some clusters stay empty; see [`Clustering::empty_clusters`].
pub fn kmeans<T: Scalar>(points: &DenseMatrix<T>, k: usize, opts: &KMeansOptions) -> Result<KMeansResult> {
    let n = points.rows();
    if k == 0 || k > n {
        return domain(format!("need 1 <= k <= n, got k={k}, n={n}"));
    }
    if opts.restarts == 0 || opts.max_iter == 0 {
        return domain("kmeans needs at least one restart and one iteration");
    }
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| points.row(i).iter().map(|v| v.as_f64()).collect())
        .collect();
    let mut rng = Stream::new(opts.seed);
    let mut best: Option<(Vec<usize>, f64, Vec<f64>, usize)> = None;
    for _ in 0..opts.restarts {
        let centers = plus_plus(&x, k, &mut rng);
        let run = lloyd(&x, centers, opts.max_iter);
        if best.as_ref().is_none_or(|b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (labels, wcss, history, iterations) = best.expect("restarts >= 1");
    Ok(KMeansResult {
        clustering: Clustering::new(labels, k)?,
        wcss,
        history,
        iterations,
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus(x: &[Vec<f64>], k: usize, rng: &mut Stream) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut centers = vec![x[rng.below(n)].clone()];
    let mut d2: Vec<f64> = x.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.uniform() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // every point coincides with a center already
            rng.below(n)
        };
        let c = x[pick].clone();
        for (d, p) in d2.iter_mut().zip(x) {
            *d = d.min(sq_dist(p, &c));
        }
        centers.push(c);
    }
    centers
}

fn assign(x: &[Vec<f64>], centers: &[Vec<f64>]) -> Vec<usize> {
    x.par_iter()
        .map(|p| {
            let mut best = (0usize, f64::INFINITY);
            for (c, center) in centers.iter().enumerate() {
                let d = sq_dist(p, center);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect()
}

/// Moves each center to its cluster mean; empty clusters keep their center.
fn update(x: &[Vec<f64>], labels: &[usize], centers: &mut [Vec<f64>]) {
    let dim = x[0].len();
    let mut sums = vec![vec![0.0; dim]; centers.len()];
    let mut counts = vec![0usize; centers.len()];
    for (p, &l) in x.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    for ((c, s), &cnt) in centers.iter_mut().zip(sums).zip(&counts) {
        if cnt > 0 {
            *c = s.into_iter().map(|v| v / cnt as f64).collect();
        }
    }
}

fn wcss(x: &[Vec<f64>], labels: &[usize], centers: &[Vec<f64>]) -> f64 {
    x.iter().zip(labels).map(|(p, &l)| sq_dist(p, &centers[l])).sum()
}

fn lloyd(x: &[Vec<f64>], mut centers: Vec<Vec<f64>>, max_iter: usize) -> (Vec<usize>, f64, Vec<f64>, usize) {
    let mut labels = assign(x, &centers);
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        update(x, &labels, &mut centers);
        history.push(wcss(x, &labels, &centers));
        iterations += 1;
        if iterations >= max_iter {
            break;
        }
        let next = assign(x, &centers);
        if next == labels {
            break;
        }
        labels = next;
    }
    let score = *history.last().expect("one iteration");
    (labels, score, history, iterations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn one_dimensional_example() {
        let p = pts(&[&[0.0], &[0.1], &[10.0], &[10.1]]);
        let r = kmeans(&p, 2, &KMeansOptions::new(3)).unwrap();
        let l = r.clustering.labels();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
        assert!((r.wcss - 0.01).abs() < 1e-12);
    }

    #[test]
    fn n_equals_k() {
        let p = pts(&[&[0.0, 1.0], &[5.0, 2.0], &[-3.0, 0.5]]);
        let r = kmeans(&p, 3, &KMeansOptions::new(0)).unwrap();
        assert_eq!(r.wcss, 0.0);
        let mut l = r.clustering.labels().to_vec();
        l.sort();
        assert_eq!(l, vec![0, 1, 2]);
    }

    #[test]
    fn duplicates_leave_empty_clusters() {
        let p = pts(&[&[1.0], &[1.0], &[1.0], &[2.0]]);
        let r = kmeans(&p, 3, &KMeansOptions::new(9)).unwrap();
        assert_eq!(r.clustering.empty_clusters().len(), 1);
        assert_eq!(r.wcss, 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let p = DenseMatrix::from_fn(60, 2, |i, j| ((i * 7 + j * 13) % 17) as f64);
        let a = kmeans(&p, 4, &KMeansOptions::new(5)).unwrap();
        let b = kmeans(&p, 4, &KMeansOptions::new(5)).unwrap();
        assert_eq!(a.clustering, b.clustering);
        assert_eq!(a.history, b.history);
    }

    #[test]
    fn bad_k() {
        let p = pts(&[&[0.0], &[1.0]]);
        assert!(kmeans(&p, 0, &KMeansOptions::new(0)).is_err());
        assert!(kmeans(&p, 3, &KMeansOptions::new(0)).is_err());
    }
}
