//! Adjacency spectral embedding and scree-based dimension selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::matrix::DenseMatrix;
use crate::model::LatentMatrix;
use crate::scalar::Scalar;

/// Top eigenpairs of a symmetric matrix: `values` non-increasing, `vectors`
/// an `n x m` matrix with orthonormal columns, column `j` paired with
/// `values[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EigenPairs<S: Scalar = f64> {
    pub values: Vec<S>,
    pub vectors: DenseMatrix<S>,
}

/// Top-`m` algebraically largest eigenpairs of a symmetric matrix.
pub fn top_eigen<S: Scalar>(m: &DenseMatrix<S>, count: usize) -> Result<EigenPairs<S>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !m.is_symmetric_within(S::cst(1e-8)) {
        return Err(Error::NotSymmetric(m.max_asymmetry().to_f64().unwrap_or(f64::NAN)));
    }
    if count < 1 || count > n {
        return Err(Error::InvalidArgument(format!("m={count} outside 1..={n}")));
    }
    let full = sym_eigen(m)?;
    let values = full.values[..count].to_vec();
    let mut vectors = DenseMatrix::zeros(n, count);
    for j in 0..count {
        for i in 0..n {
            vectors[(i, j)] = full.vectors[(i, j)];
        }
    }
    Ok(EigenPairs { values, vectors })
}

/// Adjacency spectral embedding: `Û Ŝ^{1/2}` from the top-`d` eigenpairs.
///
/// Accepts any symmetric real matrix so the noiseless case `Y = P0` can be
/// embedded exactly. Negative eigenvalues among the top `d` (possible for a
/// noisy adjacency matrix) are clipped to zero before the square root; the
/// count of clipped values is logged.
pub fn adjacency_spectral_embedding<S: Scalar>(
    y: &DenseMatrix<S>,
    d: usize,
) -> Result<LatentMatrix<S>> {
    let n = y.nrows();
    if d > n {
        return Err(Error::InvalidArgument(format!("d={d} exceeds n={n}")));
    }
    let pairs = top_eigen(y, d)?;
    let clipped = pairs.values.iter().filter(|&&l| l < S::zero()).count();
    if clipped > 0 {
        log::warn!("adjacency spectral embedding clipped {clipped} negative eigenvalue(s)");
    }
    let mut embedding = DenseMatrix::zeros(n, d);
    for j in 0..d {
        let root = pairs.values[j].max(S::zero()).sqrt();
        for i in 0..n {
            embedding[(i, j)] = pairs.vectors[(i, j)] * root;
        }
    }
    LatentMatrix::unconstrained(embedding)
}

/// Scree values of a symmetric matrix: singular values (absolute eigenvalues)
/// sorted non-increasing.
pub fn singular_values<S: Scalar>(m: &DenseMatrix<S>) -> Result<Vec<S>> {
    let eig = sym_eigen(m)?;
    let mut values: Vec<S> = eig.values.into_iter().map(|l| l.abs()).collect();
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

/// Locate the scree elbow: the `k` (1-based) with the largest consecutive gap
/// `sigma_k - sigma_{k+1}` over `k <= min(max_rank, len - 1)`, ties broken
/// toward the smallest `k`.
///
/// This is a deterministic stand-in for reading the cut-off from a singular
/// value plot by eye; adversarially flat spectra can defeat it, so callers
/// report the chosen dimension rather than trusting it silently.
pub fn elbow_dimension<S: Scalar>(values: &[S], max_rank: usize) -> Result<usize> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument("elbow needs at least two values".into()));
    }
    for w in values.windows(2) {
        if w[1] > w[0] + S::cst(1e-12) {
            return Err(Error::InvalidArgument("values must be non-increasing".into()));
        }
    }
    let upper = max_rank.max(1).min(values.len() - 1);
    let mut best_k = 1;
    let mut best_gap = values[0] - values[1];
    for k in 2..=upper {
        let gap = values[k - 1] - values[k];
        if gap > best_gap {
            best_gap = gap;
            best_k = k;
        }
    }
    Ok(best_k)
}
