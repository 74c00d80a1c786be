//! Orthogonal Procrustes alignment and the embedding loss it defines.
//!
//! Latent positions are only identified up to an orthogonal transformation,
//! so estimators are compared through
//! `loss = (1/n) min_W ||X_hat - X0 W||_F^2` with `W` ranging over the
//! orthogonal group. The minimizer has a closed form from the SVD of
//! `X_hatᵀ X0 = U Σ Vᵀ`: with the rotation attached to `X0` as written in the
//! loss, `W* = V Uᵀ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::svd_square;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// Optimal rotation and the loss it attains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AlignmentResult<S: Scalar = f64> {
    /// Orthogonal `d x d` matrix applied to the reference positions.
    pub rotation: DenseMatrix<S>,
    /// `(1/n) ||X_hat - X0 W*||_F^2`.
    pub loss: S,
}

/// Solve `min_W ||x_hat - x0 W||_F` over orthogonal `W` and report the
/// normalized squared loss.
///
/// When `x_hatᵀ x0` is rank deficient the minimizer is not unique; the SVD's
/// deterministic output picks one of the optima.
pub fn procrustes<S: Scalar>(
    x_hat: &DenseMatrix<S>,
    x0: &DenseMatrix<S>,
) -> Result<AlignmentResult<S>> {
    if x_hat.nrows() != x0.nrows() || x_hat.ncols() != x0.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "procrustes needs equal shapes, got {}x{} vs {}x{}",
            x_hat.nrows(),
            x_hat.ncols(),
            x0.nrows(),
            x0.ncols()
        )));
    }
    let cross = x_hat.transpose().matmul(x0)?;
    let svd = svd_square(&cross)?;
    let rotation = svd.v.matmul(&svd.u.transpose())?;

    let aligned = x0.matmul(&rotation)?;
    let diff = x_hat.sub(&aligned)?;
    let n = S::cst(x_hat.nrows() as f64);
    let fro = diff.frobenius_norm();
    Ok(AlignmentResult { rotation, loss: fro * fro / n })
}

/// Rotation-free comparison through the edge-probability matrices:
/// `(1/n) ||X_hat X_hatᵀ - X0 X0ᵀ||_F`. The embedding dimensions may differ.
pub fn edge_prob_error<S: Scalar>(x_hat: &DenseMatrix<S>, x0: &DenseMatrix<S>) -> Result<S> {
    if x_hat.nrows() != x0.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "row counts differ: {} vs {}",
            x_hat.nrows(),
            x0.nrows()
        )));
    }
    let diff = x_hat.gram().sub(&x0.gram())?;
    Ok(diff.frobenius_norm() / S::cst(x_hat.nrows() as f64))
}
