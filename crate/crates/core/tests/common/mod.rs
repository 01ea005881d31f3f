//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use rpdp::dense::DenseMatrix;
use rpdp::graph::gen_erdos_renyi;
use rpdp::{gen_preferential_attachment, gen_sbm, SparseGraph};

pub fn adjacency(g: &SparseGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    a
}

pub fn to_na(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Eigenpairs sorted by descending eigenvalue.
pub fn dense_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Spectral norm of `UUᵀ − VVᵀ` for orthonormal U, V.
pub fn dense_projector_distance(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let d = u * u.transpose() - v * v.transpose();
    SymmetricEigen::new(d).eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

/// Random test graph number `i`: SBM, preferential attachment or G(n, p)
/// in turn, with `n` in 30..=200.
pub fn mixed_graph(i: u64) -> SparseGraph {
    let n = 30 + ((i * 37) % 171) as usize;
    match i % 3 {
        0 => {
            let half = n / 2;
            gen_sbm(&[half, n - half], 0.3, 0.03, i).unwrap().0
        }
        1 => gen_preferential_attachment(n, 1 + (i as usize % 4), i).unwrap(),
        _ => gen_erdos_renyi(n, 0.08, i).unwrap(),
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
