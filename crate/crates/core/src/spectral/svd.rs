//! Thin SVD of a tall n x m matrix through its m x m Gram matrix.

use crate::dense::DenseMatrix;
use crate::error::{domain, Error, Result};
use crate::linalg::symmetric_eigen;
use crate::publisher::PublishedMatrix;
use crate::scalar::Scalar;

use super::basis::{canonicalize_signs, BasisSource, EigenBasis};

/// Relative floor below which a singular value counts as numerically zero.
const RANK_FLOOR: f64 = 1e-12;

/// Top-k left singular vectors with the matching right vectors.
#[derive(Clone, Debug)]
pub struct LeftSingular<T> {
    /// Left vectors as columns, singular values as `values`.
    pub basis: EigenBasis<T>,
    /// m x k right singular vectors.
    pub right: DenseMatrix<T>,
}

/// Top-`k` left singular basis of a published matrix. Singular values are
/// reported as the basis values.
pub fn topk_left_singular<T: Scalar>(
    published: &PublishedMatrix<T>,
    k: usize,
    tol: f64,
) -> Result<EigenBasis<T>> {
    topk_left_singular_dense(published.data(), k, tol, BasisSource::Published).map(|s| s.basis)
}

/// Thin SVD of any tall matrix.
///
/// Eigen-decomposes `AᵀA`, takes `s_i = sqrt(μ_i)` and `u_i = A v_i / s_i`,
/// then re-orthonormalizes the `u_i` to undo the orthogonality loss the
/// squared condition number introduces. `tol` bounds the accepted relative
/// residual `‖Aᵀu_i − s_i v_i‖ / s_1`.
pub fn topk_left_singular_dense<T: Scalar>(
    a: &DenseMatrix<T>,
    k: usize,
    tol: f64,
    source: BasisSource,
) -> Result<LeftSingular<T>> {
    let m = a.cols();
    if k == 0 || k > m {
        return domain(format!("need 1 <= k <= m, got k={k}, m={m}"));
    }
    if k > a.rows() {
        return domain(format!("k={k} exceeds the {} rows", a.rows()));
    }
    let eig = symmetric_eigen(&a.gram())?;
    let singular: Vec<T> = eig.values.iter().map(|&mu| mu.max(T::zero()).sqrt()).collect();
    let s1 = singular[0];
    let threshold = s1 * T::of(RANK_FLOOR);
    if s1 == T::zero() || singular[k - 1] < threshold {
        return Err(Error::RankDeficient {
            k,
            value: singular[k - 1].as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let mut right = eig.vectors.leading_columns(k);
    let mut left = a.matmul(&right)?;
    for i in 0..left.rows() {
        for (j, v) in left.row_mut(i).iter_mut().enumerate() {
            *v /= singular[j];
        }
    }
    let diag = left.orthonormalize_columns();
    if let Some(j) = diag.iter().position(|&d| d == T::zero()) {
        return Err(Error::RankDeficient {
            k: j + 1,
            value: singular[j].as_f64(),
            threshold: threshold.as_f64(),
        });
    }
    let flips = canonicalize_signs(&mut left);
    for (j, flip) in flips.into_iter().enumerate() {
        if flip {
            for i in 0..m {
                right[(i, j)] = -right[(i, j)];
            }
        }
    }

    // residual check: Aᵀ u_i against s_i v_i
    let atu = a.transpose_matmul(&left)?;
    let mut worst = 0.0f64;
    for j in 0..k {
        let r: f64 = (0..m)
            .map(|i| (atu[(i, j)] - singular[j] * right[(i, j)]).as_f64().powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r / s1.as_f64());
    }
    if worst > tol {
        return Err(Error::NotConverged {
            iterations: 1,
            residuals: vec![worst],
        });
    }
    let basis = EigenBasis::new(left, singular[..k].to_vec(), source)?;
    Ok(LeftSingular { basis, right })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_columns_give_their_norms() {
        // columns e0*3, e1*2, e2*5 scaled into a 6x3 matrix
        let mut a = DenseMatrix::<f64>::zeros(6, 3);
        a[(0, 0)] = 3.0;
        a[(1, 1)] = 1.2;
        a[(4, 1)] = 1.6;
        a[(2, 2)] = 5.0;
        let s = topk_left_singular_dense(&a, 3, 1e-10, BasisSource::Published).unwrap();
        let vals = s.basis.values();
        assert!((vals[0] - 5.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        assert!((vals[2] - 2.0).abs() < 1e-12);
        assert!(s.basis.orthonormality_error() < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = DenseMatrix::from_fn(5, 3, |i, j| if j == 2 { 0.0 } else { (i + j) as f64 });
        assert!(matches!(
            topk_left_singular_dense(&a, 3, 1e-8, BasisSource::Published),
            Err(Error::RankDeficient { k: 3, .. })
        ));
        assert!(topk_left_singular_dense(&a, 2, 1e-8, BasisSource::Published).is_ok());
        assert!(topk_left_singular_dense(&a, 4, 1e-8, BasisSource::Published).is_err());
        assert!(topk_left_singular_dense(&a, 0, 1e-8, BasisSource::Published).is_err());
    }
}
