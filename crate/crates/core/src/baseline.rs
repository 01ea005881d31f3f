//! Laplace-perturbed eigenvector publication (the LNPP comparison baseline).
//!
//! The noise scale `b` is taken as given. Its privacy meaning depends on a
//! sensitivity analysis this crate does not perform.

use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{domain, Result};
use crate::rng::Stream;
use crate::scalar::Scalar;
use crate::spectral::{BasisSource, EigenBasis};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LnppConfig {
    pub k: usize,
    pub laplace_scale: f64,
    pub seed: u64,
}

impl LnppConfig {
    fn validate(&self, basis_k: usize) -> Result<()> {
        if self.k == 0 || self.k > basis_k {
            return domain(format!("need 1 <= k <= {basis_k}, got k={}", self.k));
        }
        if !(self.laplace_scale > 0.0 && self.laplace_scale.is_finite()) {
            return domain(format!("Laplace scale must be positive, got {}", self.laplace_scale));
        }
        Ok(())
    }
}

/// First `k` basis columns plus i.i.d. Laplace(0, b) noise, before any
/// renormalization. Noise is drawn column by column from one stream.
pub fn lnpp_noise<T: Scalar>(basis: &EigenBasis<T>, cfg: &LnppConfig) -> Result<DenseMatrix<T>> {
    cfg.validate(basis.k())?;
    let mut out = basis.vectors().leading_columns(cfg.k);
    let mut rng = Stream::new(cfg.seed);
    for j in 0..cfg.k {
        for i in 0..out.rows() {
            out[(i, j)] += T::of(rng.laplace(cfg.laplace_scale));
        }
    }
    Ok(out)
}

/// Perturbed basis with every column rescaled to unit norm. Values are
/// copied from the input; columns are no longer mutually orthogonal.
pub fn lnpp_publish<T: Scalar>(basis: &EigenBasis<T>, cfg: &LnppConfig) -> Result<EigenBasis<T>> {
    let mut noisy = lnpp_noise(basis, cfg)?;
    for (j, norm) in noisy.column_norms().into_iter().enumerate() {
        if norm == T::zero() {
            return domain(format!("column {j} vanished after perturbation"));
        }
        for i in 0..noisy.rows() {
            noisy[(i, j)] /= norm;
        }
    }
    EigenBasis::new(noisy, basis.values()[..cfg.k].to_vec(), BasisSource::Lnpp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> EigenBasis<f64> {
        let v = DenseMatrix::from_columns(4, &[vec![0.5; 4], vec![0.5, 0.5, -0.5, -0.5]]).unwrap();
        EigenBasis::new(v, vec![3.0, 1.0], BasisSource::Original).unwrap()
    }

    #[test]
    fn tiny_noise_is_identity() {
        let b = basis();
        let cfg = LnppConfig { k: 2, laplace_scale: 1e-14, seed: 1 };
        let out = lnpp_publish(&b, &cfg).unwrap();
        assert!(out.vectors().max_abs_diff(b.vectors()) < 1e-9);
        assert_eq!(out.source(), BasisSource::Lnpp);
    }

    #[test]
    fn columns_are_unit() {
        let cfg = LnppConfig { k: 2, laplace_scale: 1.0, seed: 4 };
        let out = lnpp_publish(&basis(), &cfg).unwrap();
        for c in out.vectors().column_norms() {
            assert!((c - 1.0).abs() < 1e-12);
        }
        assert_eq!(out, lnpp_publish(&basis(), &cfg).unwrap());
    }

    #[test]
    fn rejects_bad_config() {
        let b = basis();
        assert!(lnpp_publish(&b, &LnppConfig { k: 3, laplace_scale: 1.0, seed: 0 }).is_err());
        assert!(lnpp_publish(&b, &LnppConfig { k: 1, laplace_scale: 0.0, seed: 0 }).is_err());
    }
}
