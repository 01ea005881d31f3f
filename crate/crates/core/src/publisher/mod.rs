//! Random-projection publication of an adjacency matrix: `Â = A·P + Q`.
//!
//! `P` is n x m with i.i.d. N(0, 1/m) entries and `Q` is n x m with i.i.d.
//! N(0, σ²) entries. Both are generated column block by column block from
//! their own seeds (see [`crate::rng`]), so no n x n object and no separate
//! copy of `P` or `Q` is ever held: peak extra memory is the output plus one
//! n x [`BLOCK_COLUMNS`](crate::rng::BLOCK_COLUMNS) block.
//!
//! The privacy guarantee covers a change in a single entry of `A`. Flipping
//! an undirected edge changes two symmetric entries, which this module does
//! not account for separately.

mod calibrate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{domain, Result};
use crate::graph::SparseGraph;
use crate::rng::{block_count, block_range, Stream, StreamKind};
use crate::scalar::Scalar;

pub use calibrate::calibrate_sigma;

/// Noise level plus, when calibrated, the (ε, δ) budget it satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub sigma: f64,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub calibrated: bool,
}

impl PrivacyParams {
    /// σ set to the smallest value that gives (ε, δ)-privacy for `n` nodes.
    pub fn calibrated(epsilon: f64, delta: f64, n: usize) -> Result<Self> {
        let sigma = calibrate_sigma(epsilon, delta, n)?;
        Ok(Self {
            sigma,
            epsilon: Some(epsilon),
            delta: Some(delta),
            calibrated: true,
        })
    }

    /// A user-chosen σ with no privacy claim attached.
    pub fn uncalibrated(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return domain(format!("sigma must be finite and non-negative, got {sigma}"));
        }
        Ok(Self {
            sigma,
            epsilon: None,
            delta: None,
            calibrated: false,
        })
    }

    /// Re-checks the calibrated invariant against `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return domain(format!("sigma must be finite and non-negative, got {}", self.sigma));
        }
        if self.calibrated {
            let (Some(eps), Some(delta)) = (self.epsilon, self.delta) else {
                return domain("calibrated parameters need both epsilon and delta");
            };
            let floor = calibrate_sigma(eps, delta, n)?;
            if self.sigma < floor {
                return domain(format!(
                    "sigma {} is below the calibrated minimum {floor} for n={n}",
                    self.sigma
                ));
            }
        }
        Ok(())
    }
}

/// Projection width and the two independent seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionConfig {
    pub m: usize,
    pub seed: u64,
    pub noise_seed: u64,
}

/// Smallest projection width the calibration proof supports: ⌈4·ln(n/δ)⌉.
pub fn min_calibrated_width(n: usize, delta: f64) -> usize {
    (4.0 * (n as f64 / delta).ln()).ceil() as usize
}

/// Everything recorded about how a published matrix was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublishMeta {
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub seed: u64,
    pub noise_seed: u64,
    pub calibrated: bool,
    pub graph_digest: [u8; 32],
}

/// The released n x m matrix `Â` and its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct PublishedMatrix<T> {
    data: DenseMatrix<T>,
    meta: PublishMeta,
}

impl<T: Scalar> PublishedMatrix<T> {
    pub fn from_parts(data: DenseMatrix<T>, meta: PublishMeta) -> Result<Self> {
        if data.rows() != meta.n || data.cols() != meta.m {
            return Err(crate::Error::Dimension(format!(
                "metadata says {}x{} but data is {}x{}",
                meta.n,
                meta.m,
                data.rows(),
                data.cols()
            )));
        }
        Ok(Self { data, meta })
    }

    pub fn data(&self) -> &DenseMatrix<T> {
        &self.data
    }

    pub fn meta(&self) -> &PublishMeta {
        &self.meta
    }

    pub fn n(&self) -> usize {
        self.meta.n
    }

    pub fn m(&self) -> usize {
        self.meta.m
    }

    /// Bytes held by the matrix payload.
    pub fn memory_bytes(&self) -> usize {
        self.meta.n * self.meta.m * std::mem::size_of::<T>()
    }
}

/// Result of comparing the largest squared row norm of `P` against its
/// high-probability bound `1 + 2·sqrt(ln(n/δ)/m) + 2·ln(n/δ)/m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RowNormCheck {
    pub w2_squared: f64,
    pub bound: f64,
    pub ok: bool,
}

pub fn row_norm_bound(n: usize, m: usize, delta: f64) -> f64 {
    let l = (n as f64 / delta).ln();
    let m = m as f64;
    1.0 + 2.0 * (l / m).sqrt() + 2.0 * l / m
}

pub fn row_norm_bound_check<T: Scalar>(p: &DenseMatrix<T>, delta: f64) -> RowNormCheck {
    let w2_squared = (0..p.rows())
        .map(|i| p.row(i).iter().map(|&v| v.as_f64() * v.as_f64()).sum::<f64>())
        .fold(0.0, f64::max);
    check_from_w2(w2_squared, p.rows(), p.cols(), delta)
}

fn check_from_w2(w2_squared: f64, n: usize, m: usize, delta: f64) -> RowNormCheck {
    let bound = row_norm_bound(n, m, delta);
    RowNormCheck {
        w2_squared,
        bound,
        ok: w2_squared <= bound,
    }
}

/// Noise scale needed for a concrete projection:
/// `w₂(P)/ε · sqrt(2(ε + ln(1/(2δ))))`.
pub fn sigma_requirement(w2: f64, epsilon: f64, delta: f64) -> f64 {
    w2 / epsilon * (2.0 * (epsilon + (1.0 / (2.0 * delta)).ln())).sqrt()
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if m == 0 || m >= n {
        return domain(format!("projection width must satisfy 1 <= m < n, got m={m}, n={n}"));
    }
    Ok(())
}

/// Fills one row-major n x width block from `stream`.
fn fill_block<T: Scalar>(out: &mut [T], stream: &mut Stream, std_dev: f64) {
    for v in out.iter_mut() {
        *v = T::of(std_dev * stream.standard_normal());
    }
}

/// The n x m projection matrix with i.i.d. N(0, 1/m) entries for `seed`.
/// Identical to the `P` that [`publish`] uses with the same seed.
pub fn sample_projection<T: Scalar>(n: usize, m: usize, seed: u64) -> Result<DenseMatrix<T>> {
    check_dims(n, m)?;
    let std_dev = 1.0 / (m as f64).sqrt();
    let mut p = DenseMatrix::zeros(n, m);
    let mut block = Vec::new();
    for b in 0..block_count(m) {
        let cols = block_range(m, b);
        let w = cols.len();
        block.resize(n * w, T::zero());
        fill_block(&mut block, &mut Stream::for_block(seed, StreamKind::Projection, b), std_dev);
        for i in 0..n {
            p.row_mut(i)[cols.clone()].copy_from_slice(&block[i * w..(i + 1) * w]);
        }
    }
    Ok(p)
}

/// Output of [`publish_with_diagnostics`].
#[derive(Clone, Debug)]
pub struct Publication<T> {
    pub matrix: PublishedMatrix<T>,
    /// Row-norm check of the `P` that was used, against `delta` (or 0.05
    /// when the run is uncalibrated).
    pub row_norms: RowNormCheck,
}

/// Publishes `Â = A·P + Q`. See [`publish_with_diagnostics`].
pub fn publish<T: Scalar>(
    g: &SparseGraph,
    cfg: &ProjectionConfig,
    privacy: &PrivacyParams,
) -> Result<PublishedMatrix<T>> {
    publish_with_diagnostics(g, cfg, privacy).map(|p| p.matrix)
}

/// Publishes `Â = A·P + Q` and reports the row-norm check of `P`.
///
/// Fails when `m >= n`, when calibrated parameters are inconsistent, or
/// when a calibrated run uses `m < 4·ln(n/δ)` (the calibration proof does
/// not cover it). Uncalibrated runs skip the width requirement.
pub fn publish_with_diagnostics<T: Scalar>(
    g: &SparseGraph,
    cfg: &ProjectionConfig,
    privacy: &PrivacyParams,
) -> Result<Publication<T>> {
    let n = g.n();
    let m = cfg.m;
    check_dims(n, m)?;
    privacy.validate(n)?;
    if privacy.calibrated {
        let delta = privacy.delta.expect("validated");
        let need = min_calibrated_width(n, delta);
        if m < need {
            return domain(format!(
                "calibrated publication requires m >= 4 ln(n/delta) = {need} for n={n}, delta={delta}; got m={m}"
            ));
        }
    }

    let proj_std = 1.0 / (m as f64).sqrt();
    let mut out = DenseMatrix::<T>::zeros(n, m);
    let mut row_sq = vec![0.0f64; n];
    let mut block: Vec<T> = Vec::new();
    for b in 0..block_count(m) {
        let cols = block_range(m, b);
        let w = cols.len();
        block.resize(n * w, T::zero());
        fill_block(&mut block, &mut Stream::for_block(cfg.seed, StreamKind::Projection, b), proj_std);
        for (i, sq) in row_sq.iter_mut().enumerate() {
            *sq += block[i * w..(i + 1) * w].iter().map(|&v| v.as_f64() * v.as_f64()).sum::<f64>();
        }
        let block_ref = &block;
        out.as_mut_slice()
            .par_chunks_mut(m)
            .enumerate()
            .for_each(|(i, row)| {
                let dst = &mut row[cols.clone()];
                for &j in g.neighbors(i) {
                    let src = &block_ref[j as usize * w..(j as usize + 1) * w];
                    for (o, &v) in dst.iter_mut().zip(src) {
                        *o += v;
                    }
                }
            });
        if privacy.sigma > 0.0 {
            let mut noise = Stream::for_block(cfg.noise_seed, StreamKind::Noise, b);
            let sigma = privacy.sigma;
            for i in 0..n {
                for o in &mut out.row_mut(i)[cols.clone()] {
                    *o += T::of(sigma * noise.standard_normal());
                }
            }
        }
    }

    let w2_squared = row_sq.into_iter().fold(0.0, f64::max);
    let row_norms = check_from_w2(w2_squared, n, m, privacy.delta.unwrap_or(0.05));
    let meta = PublishMeta {
        n,
        m,
        sigma: privacy.sigma,
        epsilon: privacy.epsilon,
        delta: privacy.delta,
        seed: cfg.seed,
        noise_seed: cfg.noise_seed,
        calibrated: privacy.calibrated,
        graph_digest: g.digest(),
    };
    Ok(Publication {
        matrix: PublishedMatrix::from_parts(out, meta)?,
        row_norms,
    })
}
