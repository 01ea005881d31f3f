//! Row-major dense matrices and the handful of kernels the pipeline needs.

use rayon::prelude::*;

use crate::error::{dimension, Result};
use crate::scalar::Scalar;

/// Rows per partial sum in [`DenseMatrix::gram`]. Fixed so the reduction
/// order does not depend on the thread count.
const GRAM_CHUNK_ROWS: usize = 256;

/// Dense real matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return dimension(format!(
                "{} values cannot fill a {rows}x{cols} matrix",
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self> {
        if let Some(bad) = columns.iter().position(|c| c.len() != rows) {
            return dimension(format!("column {bad} does not have {rows} entries"));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[T]) {
        assert_eq!(values.len(), self.rows);
        for (i, &v) in values.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    /// Copy of the leading `k` columns.
    pub fn leading_columns(&self, k: usize) -> Self {
        assert!(k <= self.cols);
        Self::from_fn(self.rows, k, |i, j| self[(i, j)])
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&mut self, factor: T) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        if other.cols == 0 {
            return Ok(out);
        }
        out.data
            .par_chunks_mut(other.cols)
            .enumerate()
            .for_each(|(i, out_row)| {
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a == T::zero() {
                        continue;
                    }
                    for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                        *o += a * b;
                    }
                }
            });
        Ok(out)
    }

    /// `selfᵀ * other`, without forming the transpose.
    pub fn transpose_matmul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return dimension(format!(
                "cannot form transpose product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Self::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            let b = other.row(r);
            for (i, &a) in self.row(r).iter().enumerate() {
                if a == T::zero() {
                    continue;
                }
                for (o, &bv) in out.row_mut(i).iter_mut().zip(b) {
                    *o += a * bv;
                }
            }
        }
        Ok(out)
    }

    /// Gram matrix `selfᵀ self` (cols x cols), symmetric by construction.
    pub fn gram(&self) -> Self {
        let c = self.cols;
        let partials: Vec<Vec<T>> = (0..self.rows)
            .collect::<Vec<_>>()
            .par_chunks(GRAM_CHUNK_ROWS)
            .map(|chunk| {
                let mut acc = vec![T::zero(); c * c];
                for &r in chunk {
                    let row = self.row(r);
                    for i in 0..c {
                        let a = row[i];
                        if a == T::zero() {
                            continue;
                        }
                        let dst = &mut acc[i * c..i * c + c];
                        for j in i..c {
                            dst[j] += a * row[j];
                        }
                    }
                }
                acc
            })
            .collect();
        let mut out = Self::zeros(c, c);
        for part in &partials {
            for (o, &p) in out.data.iter_mut().zip(part) {
                *o += p;
            }
        }
        for i in 0..c {
            for j in 0..i {
                out.data[i * c + j] = out.data[j * c + i];
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max)
    }

    pub fn column_norms(&self) -> Vec<T> {
        let mut acc = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (a, &v) in acc.iter_mut().zip(self.row(i)) {
                *a += v * v;
            }
        }
        acc.into_iter().map(|v| v.sqrt()).collect()
    }

    /// Largest absolute deviation of `selfᵀ self` from the identity.
    pub fn orthonormality_error(&self) -> T {
        let g = self.gram();
        let mut worst = T::zero();
        for i in 0..self.cols {
            for j in 0..self.cols {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Orthonormalizes the columns in place by classical Gram–Schmidt with
    /// one full reorthogonalization pass. Returns the diagonal of the
    /// triangular factor; a zero entry marks a column that was linearly
    /// dependent on its predecessors (left as zeros).
    pub fn orthonormalize_columns(&mut self) -> Vec<T> {
        let mut diag = Vec::with_capacity(self.cols);
        let mut cols: Vec<Vec<T>> = (0..self.cols).map(|j| self.column(j)).collect();
        for j in 0..cols.len() {
            let (done, rest) = cols.split_at_mut(j);
            let v = &mut rest[0];
            let before = norm(v);
            for _ in 0..2 {
                for q in done.iter() {
                    let proj = dot(q, v);
                    axpy(-proj, q, v);
                }
            }
            let nv = norm(v);
            if nv <= before * T::epsilon() * T::of(16.0) || nv == T::zero() {
                v.iter_mut().for_each(|x| *x = T::zero());
                diag.push(T::zero());
            } else {
                v.iter_mut().for_each(|x| *x /= nv);
                diag.push(nv);
            }
        }
        for (j, c) in cols.iter().enumerate() {
            self.set_column(j, c);
        }
        diag
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub(crate) fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_small() {
        let a = DenseMatrix::from_vec(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let b = DenseMatrix::from_vec(3, 2, vec![7.0, 8.0, 9.0, 10.0, 11.0, 12.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.as_slice(), &[58.0, 64.0, 139.0, 154.0]);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn gram_matches_transpose_product() {
        let a = DenseMatrix::from_fn(600, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let g = a.gram();
        let reference = a.transpose().matmul(&a).unwrap();
        assert!(g.max_abs_diff(&reference) < 1e-9);
        assert_eq!(a.transpose_matmul(&a).unwrap(), reference);
    }

    #[test]
    fn orthonormalize_flags_dependent_columns() {
        let mut a =
            DenseMatrix::from_columns(3, &[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]])
                .unwrap();
        let diag = a.orthonormalize_columns();
        assert_eq!(diag[1], 0.0);
        assert!(diag[0] > 0.0 && diag[2] > 0.0);
        let q = DenseMatrix::from_columns(3, &[a.column(0), a.column(2)]).unwrap();
        assert!(q.orthonormality_error() < 1e-14);
    }
}
