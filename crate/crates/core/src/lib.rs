//! Latent-position estimation for random dot product graphs.
//!
//! A random dot product graph (RDPG) places each vertex at a latent position
//! `x_i` and draws edges independently with probability `x_iᵀx_j`. This crate
//! provides three estimators of the latent positions from an observed
//! adjacency matrix, plus the machinery to compare them:
//!
//! - **ASE** — the adjacency spectral embedding `Û Ŝ^{1/2}` from the top-d
//!   eigenpairs of the adjacency matrix ([`spectral`]).
//! - **PSE** — the posterior spectral embedding: a Metropolis-Hastings chain
//!   over the exact Bernoulli likelihood with a prior on the constrained
//!   latent space, summarized by the posterior mean of the edge-probability
//!   matrix and its spectral point estimator ([`mcmc`]).
//! - **GSE** — the Gaussian spectral embedding: the same chain driven by a
//!   Gaussian working likelihood and Gaussian prior, the Bayesian analogue of
//!   ASE ([`mcmc`]).
//!
//! Around those sit graph and block-model generators ([`model`]), orthogonal
//! Procrustes alignment and embedding losses ([`align`]), K-means clustering
//! with partition metrics ([`cluster`]), a brute-force quadrature oracle for
//! validating the sampler on tiny instances ([`oracle`]), and a benchmark
//! harness ([`experiment`]) that the `rdpg` CLI wraps.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); all types
//! default their scalar parameter to `f64`, which is what the re-exports at
//! the crate root resolve to.

pub mod align;
pub mod cluster;
pub mod error;
pub mod experiment;
pub mod graphio;
pub mod likelihood;
pub mod linalg;
pub mod matrix;
pub mod mcmc;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod seeding;
pub mod spectral;

pub use align::{edge_prob_error, procrustes, AlignmentResult};
pub use cluster::{kmeans, min_permutation_hamming, rand_index, ClusterAssignment};
pub use error::{Error, Result};
pub use experiment::{
    run_experiment, DimensionSpec, ExperimentResult, ExperimentSpec, Method, SetupKind,
};
pub use likelihood::PriorSpec;
pub use matrix::DenseMatrix;
pub use mcmc::{point_estimator, run_chain, ChainConfig, ChainTarget, PosteriorSummary};
pub use model::{AdjacencyMatrix, EdgeProbMatrix, LatentMatrix, SbmSpec};
pub use scalar::Scalar;
pub use spectral::EigenPairs;

/// Concrete `f64` aliases for the generic core types.
pub mod f64_types {
    pub type LatentMatrix = crate::model::LatentMatrix<f64>;
    pub type EdgeProbMatrix = crate::model::EdgeProbMatrix<f64>;
    pub type SbmSpec = crate::model::SbmSpec<f64>;
    pub type DenseMatrix = crate::matrix::DenseMatrix<f64>;
    pub type EigenPairs = crate::spectral::EigenPairs<f64>;
    pub type PriorSpec = crate::likelihood::PriorSpec<f64>;
    pub type ChainConfig = crate::mcmc::ChainConfig<f64>;
    pub type PosteriorSummary = crate::mcmc::PosteriorSummary<f64>;
    pub type AlignmentResult = crate::align::AlignmentResult<f64>;
    pub type ClusterAssignment = crate::cluster::ClusterAssignment<f64>;
}
