use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Where a basis came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisSource {
    /// Eigenvectors of the adjacency matrix.
    Original,
    /// Left singular vectors of a published matrix.
    Published,
    /// Laplace-perturbed eigenvectors.
    Lnpp,
}

impl BasisSource {
    pub fn code(self) -> u8 {
        match self {
            BasisSource::Original => 0,
            BasisSource::Published => 1,
            BasisSource::Lnpp => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(BasisSource::Original),
            1 => Ok(BasisSource::Published),
            2 => Ok(BasisSource::Lnpp),
            other => Err(Error::Format(format!("unknown basis source tag {other}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BasisSource::Original => "original",
            BasisSource::Published => "published",
            BasisSource::Lnpp => "lnpp",
        }
    }
}

/// `k` unit n-vectors (columns of `vectors`) with spectral values in
/// descending order: eigenvalues for [`BasisSource::Original`], singular
/// values for [`BasisSource::Published`].
#[derive(Clone, Debug, PartialEq)]
pub struct EigenBasis<T> {
    vectors: DenseMatrix<T>,
    values: Vec<T>,
    source: BasisSource,
}

impl<T: Scalar> EigenBasis<T> {
    pub fn new(vectors: DenseMatrix<T>, values: Vec<T>, source: BasisSource) -> Result<Self> {
        if values.len() != vectors.cols() {
            return Err(Error::Dimension(format!(
                "{} values for {} vectors",
                values.len(),
                vectors.cols()
            )));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return domain("spectral values must be in descending order");
        }
        Ok(Self {
            vectors,
            values,
            source,
        })
    }

    pub fn vectors(&self) -> &DenseMatrix<T> {
        &self.vectors
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn source(&self) -> BasisSource {
        self.source
    }

    pub fn n(&self) -> usize {
        self.vectors.rows()
    }

    pub fn k(&self) -> usize {
        self.vectors.cols()
    }

    /// The leading `k` pairs.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.k() {
            return domain(format!("cannot take {k} of {} basis vectors", self.k()));
        }
        Ok(Self {
            vectors: self.vectors.leading_columns(k),
            values: self.values[..k].to_vec(),
            source: self.source,
        })
    }

    /// `‖VᵀV − I‖_max`.
    pub fn orthonormality_error(&self) -> T {
        self.vectors.orthonormality_error()
    }
}

/// Flips each column so its entry of largest magnitude (first on ties) is
/// positive. Returns the signs applied.
pub(crate) fn canonicalize_signs<T: Scalar>(m: &mut DenseMatrix<T>) -> Vec<bool> {
    let mut flipped = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut best = T::zero();
        let mut sign_neg = false;
        for i in 0..m.rows() {
            let v = m[(i, j)];
            if v.abs() > best {
                best = v.abs();
                sign_neg = v < T::zero();
            }
        }
        if sign_neg {
            for i in 0..m.rows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
        flipped.push(sign_neg);
    }
    flipped
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_checks_shape_and_order() {
        let v = DenseMatrix::<f64>::identity(3).leading_columns(2);
        assert!(EigenBasis::new(v.clone(), vec![1.0], BasisSource::Original).is_err());
        assert!(EigenBasis::new(v.clone(), vec![1.0, 2.0], BasisSource::Original).is_err());
        let b = EigenBasis::new(v, vec![2.0, 1.0], BasisSource::Original).unwrap();
        assert_eq!(b.truncate(1).unwrap().values(), &[2.0]);
        assert!(b.truncate(3).is_err());
        assert_eq!(b.orthonormality_error(), 0.0);
    }

    #[test]
    fn source_codes_round_trip() {
        for s in [BasisSource::Original, BasisSource::Published, BasisSource::Lnpp] {
            assert_eq!(BasisSource::from_code(s.code()).unwrap(), s);
        }
        assert!(BasisSource::from_code(9).is_err());
    }

    #[test]
    fn sign_canonicalization() {
        let mut m = DenseMatrix::from_vec(3, 1, vec![0.1, -0.9, 0.3]).unwrap();
        let flipped = canonicalize_signs(&mut m);
        assert_eq!(flipped, vec![true]);
        assert_eq!(m.column(0), vec![-0.1, 0.9, -0.3]);
    }
}
