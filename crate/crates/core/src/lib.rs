//! Differentially private publication of graph adjacency matrices by random
//! projection (`Â = A·P + Q`), with spectral recovery, spectral clustering,
//! principal component centrality, a Laplace-perturbation baseline and an
//! evaluation harness.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which is what the file formats store.

pub mod analytics;
pub mod baseline;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod format;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod publisher;
pub mod rng;
pub mod scalar;
pub mod spectral;

pub use analytics::{
    kmeans, pcc_scores, private_pcc_scores, spectral_cluster, top_t, Clustering, KMeansOptions, PccMode,
    PccScores,
};
pub use baseline::{lnpp_publish, LnppConfig};
pub use error::{Error, Result};
pub use experiment::{run_experiment, EvalReport, ExperimentPlan};
pub use graph::{
    degree_distribution, gen_preferential_attachment, gen_sbm, parse_edge_list, spmm, DegreeHistogram,
    SparseGraph,
};
pub use metrics::{nmi, overlap_percent, scaled_mse};
pub use publisher::{
    calibrate_sigma, publish, row_norm_bound_check, sample_projection, PrivacyParams, ProjectionConfig,
    PublishedMatrix,
};
pub use scalar::Scalar;
pub use spectral::{
    eigen_error, projector_distance, theorem2_bound, topk_eigen_symmetric, topk_left_singular, BasisSource,
    EigenBasis, ErrorBoundReport,
};

pub type Matrix = dense::DenseMatrix<f64>;
pub type Basis = EigenBasis<f64>;
pub type Published = PublishedMatrix<f64>;
pub type Matrix32 = dense::DenseMatrix<f32>;
pub type Basis32 = EigenBasis<f32>;
pub type Published32 = PublishedMatrix<f32>;
