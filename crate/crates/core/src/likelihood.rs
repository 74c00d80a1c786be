//! Log-densities driving the two samplers: the exact Bernoulli graph
//! likelihood, the Gaussian working likelihood, and the two priors.
//!
//! Normalizing constants are omitted throughout — only differences and
//! ratios ever enter the Metropolis-Hastings acceptance test. Impossible
//! observations (an edge where the model says probability zero, or the
//! reverse) evaluate to the `-inf` sentinel, which the sampler treats as
//! automatic rejection; probabilities are never clipped away from the
//! boundary.
//!
//! The `*_row_delta` variants recompute only the terms touching one vertex,
//! turning an `O(n^2 d)` acceptance test into `O(n d)`; they are the
//! sampler's hot loop.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, DenseMatrix};
use crate::model::{row_in_latent_space, AdjacencyMatrix, LatentMatrix};
use crate::scalar::Scalar;

/// Prior on the latent rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub enum PriorSpec<S: Scalar = f64> {
    /// Uniform over the constrained latent space.
    UniformOnX,
    /// Independent `N(0, sigma^2 I_d)` rows.
    Gaussian { sigma: S },
}

impl<S: Scalar> PriorSpec<S> {
    pub fn gaussian(sigma: S) -> Result<Self> {
        if sigma <= S::zero() {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self::Gaussian { sigma })
    }
}

#[inline]
fn check_shapes<S: Scalar>(x: &LatentMatrix<S>, y: &AdjacencyMatrix) -> Result<()> {
    if x.n() != y.n() {
        return Err(Error::ShapeMismatch(format!(
            "latent matrix has {} rows, adjacency has {}",
            x.n(),
            y.n()
        )));
    }
    Ok(())
}

/// One Bernoulli term `y log p + (1-y) log(1-p)` with exact boundary
/// handling: a boundary probability that disagrees with the observation is
/// the `-inf` sentinel, one that agrees contributes zero.
#[inline]
fn bernoulli_term<S: Scalar>(p: S, y: u8) -> S {
    if y == 1 {
        if p <= S::zero() {
            S::neg_infinity()
        } else if p >= S::one() {
            S::zero()
        } else {
            p.ln()
        }
    } else if p >= S::one() {
        S::neg_infinity()
    } else if p <= S::zero() {
        S::zero()
    } else {
        (-p).ln_1p()
    }
}

/// Exact Bernoulli log-likelihood `sum_{i<=j} [y_ij log p_ij + (1-y_ij) log(1-p_ij)]`
/// with `p_ij = x_i . x_j`; the pair range drops the diagonal when the graph
/// is hollow.
pub fn bernoulli_loglik<S: Scalar>(x: &LatentMatrix<S>, y: &AdjacencyMatrix) -> Result<S> {
    check_shapes(x, y)?;
    let n = x.n();
    let mut total = S::zero();
    for i in 0..n {
        let start = if y.includes_self_loops() { i } else { i + 1 };
        let yrow = y.row(i);
        for j in start..n {
            let p = dot(x.row(i), x.row(j));
            total += bernoulli_term(p, yrow[j]);
            if total == S::neg_infinity() {
                return Ok(total);
            }
        }
    }
    Ok(total)
}

/// `bernoulli_loglik(X with row i := x_new) - bernoulli_loglik(X)`, touching
/// only the `O(n)` terms that involve vertex `i`.
pub fn bernoulli_loglik_row_delta<S: Scalar>(
    x: &LatentMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
) -> Result<S> {
    check_shapes(x, y)?;
    if i >= x.n() {
        return Err(Error::InvalidArgument(format!("vertex {i} out of range")));
    }
    if x_new.len() != x.d() {
        return Err(Error::ShapeMismatch(format!(
            "replacement row has {} coordinates, expected {}",
            x_new.len(),
            x.d()
        )));
    }
    Ok(bernoulli_row_delta_raw(x.values(), y, i, x_new))
}

/// Unchecked kernel behind [`bernoulli_loglik_row_delta`]; shapes must agree.
///
/// Log terms are accumulated as batched products of per-pair probabilities
/// (new-state numerators against current-state denominators), taking two
/// `ln`s per renormalized batch instead of two per pair. The sweep visits
/// every vertex `n` times per iteration, so the inner loop is monomorphized
/// over the small embedding dimensions to let the dot products unroll.
pub(crate) fn bernoulli_row_delta_raw<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
) -> S {
    match x.ncols() {
        1 => bernoulli_row_delta_fixed::<S, 1>(x, y, i, x_new),
        2 => bernoulli_row_delta_fixed::<S, 2>(x, y, i, x_new),
        3 => bernoulli_row_delta_fixed::<S, 3>(x, y, i, x_new),
        4 => bernoulli_row_delta_fixed::<S, 4>(x, y, i, x_new),
        _ => bernoulli_row_delta_generic(x, y, i, x_new, |a, b| dot(a, b)),
    }
}

#[inline(always)]
fn bernoulli_row_delta_fixed<S: Scalar, const D: usize>(
    x: &DenseMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
) -> S {
    bernoulli_row_delta_generic(x, y, i, x_new, |a, b| {
        let mut acc = S::zero();
        for k in 0..D {
            acc += a[k] * b[k];
        }
        acc
    })
}

#[inline(always)]
fn bernoulli_row_delta_generic<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
    dot_d: impl Fn(&[S], &[S]) -> S,
) -> S {
    let n = x.nrows();
    let d = x.ncols();
    let xi = x.row(i);
    let yrow = y.row(i);
    let data = x.data();
    let lo = S::cst(1e-120);
    let hi = S::cst(1e120);

    let mut delta = S::zero();
    let mut num_acc = S::one();
    let mut den_acc = S::one();
    for j in 0..n {
        if j == i {
            continue;
        }
        let xj = &data[j * d..j * d + d];
        let p_old = dot_d(xi, xj);
        let p_new = dot_d(x_new, xj);
        // Branchless select on the edge indicator (the bitmask bounds the
        // index so the array access compiles without a check).
        let bit = usize::from(yrow[j] & 1);
        let num = [S::one() - p_new, p_new][bit];
        let den = [S::one() - p_old, p_old][bit];
        if num <= S::zero() {
            return S::neg_infinity();
        }
        num_acc = num_acc * num;
        den_acc = den_acc * den;
        if num_acc < lo || den_acc < lo || num_acc > hi || den_acc > hi {
            delta += num_acc.ln() - den_acc.ln();
            num_acc = S::one();
            den_acc = S::one();
        }
    }
    delta += num_acc.ln() - den_acc.ln();

    if y.includes_self_loops() {
        let p_old = dot_d(xi, xi);
        let p_new = dot_d(x_new, x_new);
        delta += bernoulli_term(p_new, yrow[i]) - bernoulli_term(p_old, yrow[i]);
    }
    delta
}

/// Gaussian working log-likelihood `-(1/2) sum_{i,j in [n]} (y_ij - x_i . x_j)^2`
/// (additive constant omitted).
///
/// The sum runs over ordered pairs, so every off-diagonal residual is counted
/// twice; in hollow mode the diagonal terms are skipped.
pub fn gaussian_pseudo_loglik<S: Scalar>(x: &LatentMatrix<S>, y: &AdjacencyMatrix) -> Result<S> {
    check_shapes(x, y)?;
    let n = x.n();
    let half = S::cst(0.5);
    let mut acc = S::zero();
    for i in 0..n {
        let yrow = y.row(i);
        for j in 0..n {
            if i == j && !y.includes_self_loops() {
                continue;
            }
            let r = S::cst(f64::from(yrow[j])) - dot(x.row(i), x.row(j));
            acc += r * r;
        }
    }
    Ok(-half * acc)
}

/// Row-replacement delta for [`gaussian_pseudo_loglik`]; the ordered-pair sum
/// means each off-diagonal term involving vertex `i` appears twice.
pub fn gaussian_pseudo_loglik_row_delta<S: Scalar>(
    x: &LatentMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
) -> Result<S> {
    check_shapes(x, y)?;
    if i >= x.n() {
        return Err(Error::InvalidArgument(format!("vertex {i} out of range")));
    }
    if x_new.len() != x.d() {
        return Err(Error::ShapeMismatch(format!(
            "replacement row has {} coordinates, expected {}",
            x_new.len(),
            x.d()
        )));
    }
    Ok(gaussian_row_delta_raw(x.values(), y, i, x_new))
}

pub(crate) fn gaussian_row_delta_raw<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
) -> S {
    match x.ncols() {
        1 => gaussian_row_delta_fixed::<S, 1>(x, y, i, x_new),
        2 => gaussian_row_delta_fixed::<S, 2>(x, y, i, x_new),
        3 => gaussian_row_delta_fixed::<S, 3>(x, y, i, x_new),
        4 => gaussian_row_delta_fixed::<S, 4>(x, y, i, x_new),
        _ => gaussian_row_delta_generic(x, y, i, x_new, |a, b| dot(a, b)),
    }
}

#[inline(always)]
fn gaussian_row_delta_fixed<S: Scalar, const D: usize>(
    x: &DenseMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
) -> S {
    gaussian_row_delta_generic(x, y, i, x_new, |a, b| {
        let mut acc = S::zero();
        for k in 0..D {
            acc += a[k] * b[k];
        }
        acc
    })
}

#[inline(always)]
fn gaussian_row_delta_generic<S: Scalar>(
    x: &DenseMatrix<S>,
    y: &AdjacencyMatrix,
    i: usize,
    x_new: &[S],
    dot_d: impl Fn(&[S], &[S]) -> S,
) -> S {
    let n = x.nrows();
    let d = x.ncols();
    let xi = x.row(i);
    let yrow = y.row(i);
    let data = x.data();
    let mut off = S::zero();
    for j in 0..n {
        if j == i {
            continue;
        }
        let xj = &data[j * d..j * d + d];
        let yv = S::cst(f64::from(yrow[j]));
        let r_new = yv - dot_d(x_new, xj);
        let r_old = yv - dot_d(xi, xj);
        off += r_new * r_new - r_old * r_old;
    }
    let mut total = off + off;
    if y.includes_self_loops() {
        let yv = S::cst(f64::from(yrow[i]));
        let r_new = yv - dot_d(x_new, x_new);
        let r_old = yv - dot_d(xi, xi);
        total += r_new * r_new - r_old * r_old;
    }
    -S::cst(0.5) * total
}

/// Log prior density up to its normalizing constant: zero/`-inf` for the
/// uniform prior on the latent space, `-sum_i ||x_i||^2 / (2 sigma^2)` for
/// the Gaussian.
pub fn log_prior<S: Scalar>(x: &LatentMatrix<S>, prior: &PriorSpec<S>) -> S {
    match prior {
        PriorSpec::UniformOnX => {
            for i in 0..x.n() {
                if !row_in_latent_space(x.row(i)) {
                    return S::neg_infinity();
                }
            }
            S::zero()
        }
        PriorSpec::Gaussian { sigma } => {
            let mut sum_sq = S::zero();
            for i in 0..x.n() {
                sum_sq += dot(x.row(i), x.row(i));
            }
            -sum_sq / (S::cst(2.0) * *sigma * *sigma)
        }
    }
}

/// Prior contribution of swapping row `i` from `x_old` to `x_new`.
pub(crate) fn log_prior_row_delta<S: Scalar>(
    x_old: &[S],
    x_new: &[S],
    prior: &PriorSpec<S>,
) -> S {
    match prior {
        PriorSpec::UniformOnX => {
            if row_in_latent_space(x_new) {
                S::zero()
            } else {
                S::neg_infinity()
            }
        }
        PriorSpec::Gaussian { sigma } => {
            -(dot(x_new, x_new) - dot(x_old, x_old)) / (S::cst(2.0) * *sigma * *sigma)
        }
    }
}
