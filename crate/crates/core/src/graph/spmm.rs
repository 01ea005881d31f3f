use rayon::prelude::*;

use super::SparseGraph;
use crate::dense::DenseMatrix;
use crate::error::{dimension, Result};
use crate::scalar::Scalar;

/// `A · dense` for the binary adjacency matrix `A`.
///
/// Row `i` of the result is the sum of the rows of `dense` indexed by the
/// neighbors of `i`, accumulated in ascending neighbor order. Rows are
/// computed in parallel but each one sequentially, so the output does not
/// depend on the thread count.
pub fn spmm<T: Scalar>(g: &SparseGraph, dense: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if dense.rows() != g.n() {
        return dimension(format!(
            "graph has {} nodes but the dense operand has {} rows",
            g.n(),
            dense.rows()
        ));
    }
    let c = dense.cols();
    let mut out = DenseMatrix::zeros(g.n(), c);
    if c == 0 {
        return Ok(out);
    }
    out.as_mut_slice()
        .par_chunks_mut(c)
        .enumerate()
        .for_each(|(i, out_row)| accumulate_row(g, dense, i, out_row));
    Ok(out)
}

#[inline]
pub(crate) fn accumulate_row<T: Scalar>(g: &SparseGraph, dense: &DenseMatrix<T>, i: usize, out_row: &mut [T]) {
    for &j in g.neighbors(i) {
        for (o, &v) in out_row.iter_mut().zip(dense.row(j as usize)) {
            *o += v;
        }
    }
}

/// `y = A x`.
pub fn spmv<T: Scalar>(g: &SparseGraph, x: &[T], y: &mut [T]) {
    assert_eq!(x.len(), g.n());
    assert_eq!(y.len(), g.n());
    y.par_iter_mut().enumerate().for_each(|(i, yi)| {
        let mut acc = T::zero();
        for &j in g.neighbors(i) {
            acc += x[j as usize];
        }
        *yi = acc;
    });
}
