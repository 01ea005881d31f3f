//! Top-k spectra of the original graph and of published matrices, and the
//! recovery-error metrics that compare them.

mod basis;
mod bounds;
mod lanczos;
mod svd;

pub use basis::{BasisSource, EigenBasis};
pub use bounds::{
    eigen_error, projector_distance, theorem2_bound, AssumptionFlags, ErrorBoundReport, TailEnergy,
};
pub use lanczos::{topk_eigen_operator, topk_eigen_symmetric, LanczosOptions, SymmetricOperator};
pub use svd::{topk_left_singular, topk_left_singular_dense, LeftSingular};
