//! Lanczos iteration with full reorthogonalization for the largest
//! algebraic eigenpairs of a sparse symmetric operator.
//!
//! Every new Krylov vector is orthogonalized twice against the whole basis,
//! and the projected matrix `H = VᵀAV` is formed from stored products
//! `A v_j` rather than from the three-term recurrence. That keeps the
//! Rayleigh–Ritz step exact after restarts, which happen in two cases:
//!
//! * breakdown (the Krylov space became invariant, e.g. one connected
//!   component exhausted): continue from a fresh seeded vector orthogonal to
//!   the basis;
//! * verification: a single start vector sees only one direction of a
//!   repeated eigenvalue, so after the first convergence a second chain is
//!   started from a fresh vector and the two are extended in turn for as many
//!   steps again before accepting. The first chain is kept going; dropping
//!   it would discard the residual direction of every nearly converged pair.

use crate::dense::{axpy, dot, norm, DenseMatrix};
use crate::error::{domain, Error, Result};
use crate::graph::{spmv, SparseGraph};
use crate::linalg::symmetric_eigen;
use crate::rng::Stream;
use crate::scalar::Scalar;

use super::basis::{canonicalize_signs, BasisSource, EigenBasis};

/// A symmetric linear map on `R^dim`.
pub trait SymmetricOperator<T> {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[T], y: &mut [T]);
}

impl<T: Scalar> SymmetricOperator<T> for SparseGraph {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        spmv(self, x, y)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Accept a pair when `‖A u − λ u‖ ≤ tol · max(1, |λ|)`.
    pub tol: f64,
    /// Maximum Krylov basis size (operator applications).
    pub max_iter: usize,
    pub seed: u64,
}

impl LanczosOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            tol: 1e-10,
            max_iter: (20 * k + 200).max(400),
            seed,
        }
    }
}

/// Top-`k` eigenpairs (largest algebraic eigenvalue first) of the adjacency
/// matrix of `g`.
pub fn topk_eigen_symmetric<T: Scalar>(
    g: &SparseGraph,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenBasis<T>> {
    topk_eigen_operator(
        g,
        k,
        &LanczosOptions {
            tol,
            max_iter,
            seed,
        },
    )
}

struct Ritz<T> {
    values: Vec<T>,
    coeffs: DenseMatrix<T>,
    residuals: Vec<f64>,
}

pub fn topk_eigen_operator<T: Scalar, A: SymmetricOperator<T> + ?Sized>(
    op: &A,
    k: usize,
    opts: &LanczosOptions,
) -> Result<EigenBasis<T>> {
    let n = op.dim();
    if k == 0 || k >= n {
        return domain(format!("need 1 <= k < n, got k={k}, n={n}"));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return domain(format!("tolerance must be positive, got {}", opts.tol));
    }
    let max_dim = opts.max_iter.min(n);
    if max_dim < k {
        return domain(format!("max_iter {} cannot hold {k} eigenpairs", opts.max_iter));
    }

    let mut rng = Stream::new(opts.seed);
    let breakdown = T::epsilon().sqrt();
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut images: Vec<Vec<T>> = Vec::new();
    // h[i][j] = v_i · A v_j for j >= i
    let mut h: Vec<Vec<T>> = Vec::new();
    let mut op_norm = T::zero();

    let first = random_unit_orthogonal(&mut rng, n, &basis).expect("empty basis");
    basis.push(first);

    let mut last_check = 0usize;
    let mut verify_until: Option<usize> = None;
    let mut force_restart = false;
    // index of the newest vector of each chain
    let mut chains: Vec<usize> = vec![0];
    let mut turn = 0usize;
    let mut best: Option<Ritz<T>>;

    loop {
        let j = basis.len() - 1;
        let mut w = vec![T::zero(); n];
        op.apply(&basis[j], &mut w);
        op_norm = op_norm.max(norm(&w));
        h.push(Vec::new());
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(v, &w);
            h[i].push(hij);
        }
        images.push(w);
        let dim = basis.len();

        let at_limit = dim == max_dim;
        // max_dim >= k, so reaching the limit always triggers a check
        let due = dim >= k && (dim - last_check >= check_interval(dim) || at_limit);
        if due {
            last_check = dim;
            let ritz = rayleigh_ritz(&basis, &images, &h, k)?;
            let converged = ritz
                .residuals
                .iter()
                .zip(&ritz.values)
                .all(|(&r, &v)| r <= opts.tol * v.as_f64().abs().max(1.0));
            best = Some(ritz);
            if converged {
                match verify_until {
                    None if dim < n => {
                        verify_until = Some((2 * dim).min(n));
                        force_restart = true;
                    }
                    Some(limit) if dim < limit => {}
                    _ => break,
                }
            }
            if at_limit || dim == n {
                if converged {
                    break;
                }
                let residuals = best.map(|b| b.residuals).unwrap_or_default();
                return Err(Error::NotConverged {
                    iterations: dim,
                    residuals,
                });
            }
        }

        // next basis vector
        let next = if force_restart {
            force_restart = false;
            chains.push(dim);
            random_unit_orthogonal(&mut rng, n, &basis)
        } else {
            let c = turn % chains.len();
            turn += 1;
            let mut r = images[chains[c]].clone();
            chains[c] = dim;
            orthogonalize(&mut r, &basis);
            let beta = norm(&r);
            if beta > breakdown * op_norm.max(T::one()) {
                r.iter_mut().for_each(|x| *x /= beta);
                Some(r)
            } else {
                random_unit_orthogonal(&mut rng, n, &basis)
            }
        };
        match next {
            Some(v) => basis.push(v),
            None => {
                // basis spans the whole space; the last check was exact
                let ritz = rayleigh_ritz(&basis, &images, &h, k)?;
                best = Some(ritz);
                break;
            }
        }
    }

    let ritz = best.expect("at least one Rayleigh–Ritz step");
    let mut vectors = DenseMatrix::zeros(n, k);
    for (c, v) in basis.iter().enumerate() {
        for i in 0..k {
            let coef = ritz.coeffs[(c, i)];
            if coef == T::zero() {
                continue;
            }
            for (r, &x) in v.iter().enumerate() {
                vectors[(r, i)] += coef * x;
            }
        }
    }
    canonicalize_signs(&mut vectors);
    EigenBasis::new(vectors, ritz.values, BasisSource::Original)
}

fn check_interval(dim: usize) -> usize {
    (dim / 8).clamp(2, 16)
}

fn rayleigh_ritz<T: Scalar>(
    basis: &[Vec<T>],
    images: &[Vec<T>],
    h: &[Vec<T>],
    k: usize,
) -> Result<Ritz<T>> {
    let dim = basis.len();
    let mut hm = DenseMatrix::zeros(dim, dim);
    for i in 0..dim {
        for (off, &v) in h[i].iter().enumerate() {
            let j = i + off;
            hm[(i, j)] = v;
            hm[(j, i)] = v;
        }
    }
    // h[i] holds entries for columns j = i..dim because column j was
    // appended to every existing row i <= j
    let eig = symmetric_eigen(&hm)?;
    let take = k.min(dim);
    let n = basis[0].len();
    let mut residuals = Vec::with_capacity(take);
    for i in 0..take {
        let theta = eig.values[i];
        let mut r = vec![T::zero(); n];
        for c in 0..dim {
            let s = eig.vectors[(c, i)];
            axpy(s, &images[c], &mut r);
            axpy(-theta * s, &basis[c], &mut r);
        }
        residuals.push(norm(&r).as_f64());
    }
    Ok(Ritz {
        values: eig.values[..take].to_vec(),
        coeffs: eig.vectors.leading_columns(take),
        residuals,
    })
}

/// Two passes of classical Gram–Schmidt.
fn orthogonalize<T: Scalar>(r: &mut [T], basis: &[Vec<T>]) {
    for _ in 0..2 {
        let coeffs: Vec<T> = basis.iter().map(|v| dot(v, r)).collect();
        for (v, c) in basis.iter().zip(coeffs) {
            axpy(-c, v, r);
        }
    }
}

fn random_unit_orthogonal<T: Scalar>(rng: &mut Stream, n: usize, basis: &[Vec<T>]) -> Option<Vec<T>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut r: Vec<T> = (0..n).map(|_| T::of(rng.standard_normal())).collect();
        let before = norm(&r);
        orthogonalize(&mut r, basis);
        let after = norm(&r);
        if after > before * T::of(1e-3) {
            r.iter_mut().for_each(|x| *x /= after);
            return Some(r);
        }
    }
    None
}
