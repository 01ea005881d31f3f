//! Eigenvector recovery error and its theoretical upper bound.

use serde::Serialize;

use crate::dense::DenseMatrix;
use crate::error::{domain, dimension, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::Scalar;

use super::basis::EigenBasis;

/// `Er² = max_i ‖u_i − ũ_i‖²`, with each `ũ_i` sign-aligned to `u_i` first.
///
/// Compares vectors index by index, so it is only meaningful when the
/// spectral values are distinct; inside a repeated eigenvalue the basis is
/// arbitrary and [`projector_distance`] is the right comparison.
pub fn eigen_error<T: Scalar>(original: &EigenBasis<T>, recovered: &EigenBasis<T>) -> Result<T> {
    if original.n() != recovered.n() || original.k() != recovered.k() {
        return dimension(format!(
            "cannot compare {}x{} basis with {}x{}",
            original.n(),
            original.k(),
            recovered.n(),
            recovered.k()
        ));
    }
    let u = original.vectors();
    let v = recovered.vectors();
    let mut worst = T::zero();
    for j in 0..original.k() {
        let (mut plus, mut minus) = (T::zero(), T::zero());
        for i in 0..original.n() {
            let (a, b) = (u[(i, j)], v[(i, j)]);
            plus += (a - b) * (a - b);
            minus += (a + b) * (a + b);
        }
        worst = worst.max(plus.min(minus));
    }
    Ok(worst)
}

/// Spectral-norm distance `‖UUᵀ − VVᵀ‖₂` between the column spans of two
/// orthonormal n x k matrices, computed as `‖(I − VVᵀ)U‖₂` without forming
/// any n x n matrix.
pub fn projector_distance<T: Scalar>(u: &DenseMatrix<T>, v: &DenseMatrix<T>) -> Result<T> {
    if u.rows() != v.rows() || u.cols() != v.cols() {
        return dimension(format!(
            "cannot compare spans of {}x{} and {}x{}",
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        ));
    }
    let vtu = v.transpose_matmul(u)?;
    let proj = v.matmul(&vtu)?;
    let resid = DenseMatrix::from_fn(u.rows(), u.cols(), |i, j| u[(i, j)] - proj[(i, j)]);
    let top = symmetric_eigen(&resid.gram())?
        .values
        .first()
        .copied()
        .unwrap_or(T::zero());
    Ok(top.max(T::zero()).sqrt())
}

/// How the energy `Σ_{i>k} λ_i²` of the discarded spectrum is supplied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailEnergy {
    Exact(f64),
    /// `‖A‖_F²`; the tail is this minus the squares of the top k values.
    /// For a binary graph this is twice the edge count.
    FromFrobenius(f64),
}

/// Which hypotheses of the error bound hold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AssumptionFlags {
    /// `m ≥ c(k + k ln k)` involves an unspecified universal constant `c`
    /// and is never checked; always `None`.
    pub projections: Option<bool>,
    /// `n ≥ 4(m + 1) ln(12m)`; `None` when `m` was not supplied.
    pub dimension: Option<bool>,
    /// `λ_k − λ_{k+1} ≥ 2σ sqrt(2n)`.
    pub eigengap: bool,
}

impl AssumptionFlags {
    /// True when no checked assumption is known to fail.
    pub fn checked_hold(&self) -> bool {
        self.eigengap && self.dimension != Some(false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorBoundReport {
    /// Observed `Er²`, when attached with [`ErrorBoundReport::with_observed`].
    pub er_squared: Option<f64>,
    /// `16σ²n/(λ_k − λ_{k+1})² + 32/λ_k² · Σ_{i>k} λ_i²`; infinite when
    /// the gap or `λ_k` vanishes.
    pub bound: f64,
    pub gap: f64,
    pub tail_energy: f64,
    pub assumptions: AssumptionFlags,
}

impl ErrorBoundReport {
    pub fn with_observed(mut self, er_squared: f64) -> Self {
        self.er_squared = Some(er_squared);
        self
    }

    pub fn holds(&self) -> Option<bool> {
        self.er_squared.map(|e| e <= self.bound)
    }
}

/// Evaluates the eigenvector recovery bound for noise `sigma` on an
/// `n`-node graph with eigenvalues `values` (descending, at least `k + 1`
/// of them). `m` is only used to check the dimension assumption.
pub fn theorem2_bound(
    sigma: f64,
    n: usize,
    values: &[f64],
    k: usize,
    tail: TailEnergy,
    m: Option<usize>,
) -> Result<ErrorBoundReport> {
    if k == 0 || values.len() < k + 1 {
        return domain(format!(
            "bound needs eigenvalues through index k+1 = {}, got {}",
            k + 1,
            values.len()
        ));
    }
    let lk = values[k - 1];
    let gap = lk - values[k];
    let tail_energy = match tail {
        TailEnergy::Exact(t) => t,
        TailEnergy::FromFrobenius(f) => (f - values[..k].iter().map(|v| v * v).sum::<f64>()).max(0.0),
    };
    let n_f = n as f64;
    let noise_term = if gap > 0.0 {
        16.0 * sigma * sigma * n_f / (gap * gap)
    } else if sigma == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let tail_term = if tail_energy == 0.0 {
        0.0
    } else if lk != 0.0 {
        32.0 / (lk * lk) * tail_energy
    } else {
        f64::INFINITY
    };
    let assumptions = AssumptionFlags {
        projections: None,
        dimension: m.map(|m| n_f >= 4.0 * (m as f64 + 1.0) * (12.0 * m as f64).ln()),
        eigengap: gap > 0.0 && gap >= 2.0 * sigma * (2.0 * n_f).sqrt(),
    };
    Ok(ErrorBoundReport {
        er_squared: None,
        bound: noise_term + tail_term,
        gap,
        tail_energy,
        assumptions,
    })
}
