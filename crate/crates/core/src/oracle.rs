//! Brute-force posterior moments on tiny instances by grid quadrature.
//!
//! This is the independent ground truth the sampler is validated against:
//! for `n <= 3` vertices with one-dimensional latent positions, the posterior
//! under the uniform prior is a density over `[0,1]^n` that midpoint-rule
//! quadrature integrates directly. The midpoint rule (rather than trapezoid)
//! keeps boundary cells away from the singular points of the likelihood.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::PriorSpec;
use crate::matrix::DenseMatrix;
use crate::model::AdjacencyMatrix;
use crate::scalar::Scalar;

/// Cap on the total number of grid cells.
pub const GRID_CELL_CAP: u128 = 100_000_000;

/// Quadrature resolution; the domain is `[0, 1]` per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_dim: usize,
}

impl GridSpec {
    /// Resolution defaults: fine grids for one or two free coordinates,
    /// coarser for three.
    pub fn default_for(n: usize) -> Self {
        Self { points_per_dim: if n <= 2 { 400 } else { 60 } }
    }
}

/// Posterior moments from quadrature.
#[derive(Debug, Clone)]
pub struct GridPosterior<S: Scalar = f64> {
    /// `E[x_i | Y]` per vertex.
    pub mean_positions: Vec<S>,
    /// `E[x_i x_j | Y]`, an `n x n` symmetric matrix.
    pub mean_edge_probs: DenseMatrix<S>,
}

/// Midpoint-rule posterior moments for `n <= 3`, `d = 1`, uniform prior.
///
/// Cells where the likelihood vanishes contribute nothing; the normalizer is
/// accumulated alongside the moments in a fixed traversal order.
pub fn grid_posterior_moments<S: Scalar>(
    y: &AdjacencyMatrix,
    prior: &PriorSpec<S>,
    grid: &GridSpec,
) -> Result<GridPosterior<S>> {
    let n = y.n();
    if n == 0 || n > 3 {
        return Err(Error::InvalidArgument(format!("grid oracle supports 1 <= n <= 3, got {n}")));
    }
    if !matches!(prior, PriorSpec::UniformOnX) {
        return Err(Error::InvalidArgument(
            "grid oracle is defined for the uniform prior only".into(),
        ));
    }
    let g = grid.points_per_dim;
    if g < 2 {
        return Err(Error::InvalidArgument("need at least 2 points per dimension".into()));
    }
    let cells = (g as u128).pow(n as u32);
    if cells > GRID_CELL_CAP {
        return Err(Error::GridCapExceeded(cells, GRID_CELL_CAP));
    }

    let nodes: Vec<S> =
        (0..g).map(|k| (S::cst(k as f64) + S::cst(0.5)) / S::cst(g as f64)).collect();

    let mut normalizer = S::zero();
    let mut first = vec![S::zero(); n];
    let mut second: DenseMatrix<S> = DenseMatrix::zeros(n, n);
    let mut point = vec![S::zero(); n];
    let mut index = vec![0usize; n];

    'cells: loop {
        for (coord, &node_idx) in point.iter_mut().zip(&index) {
            *coord = nodes[node_idx];
        }
        let weight = likelihood_at(&point, y);
        if weight > S::zero() {
            normalizer += weight;
            for i in 0..n {
                first[i] += weight * point[i];
                for j in i..n {
                    second[(i, j)] += weight * point[i] * point[j];
                }
            }
        }

        // Odometer increment over the grid.
        for pos in (0..n).rev() {
            index[pos] += 1;
            if index[pos] < g {
                continue 'cells;
            }
            index[pos] = 0;
        }
        break;
    }

    if normalizer <= S::zero() {
        return Err(Error::InvalidArgument(
            "posterior mass is zero on the grid (impossible observation)".into(),
        ));
    }
    for v in &mut first {
        *v = *v / normalizer;
    }
    let mut mean_edge_probs = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = second[(i, j)] / normalizer;
            mean_edge_probs[(i, j)] = v;
            mean_edge_probs[(j, i)] = v;
        }
    }
    Ok(GridPosterior { mean_positions: first, mean_edge_probs })
}

/// Bernoulli likelihood of one grid point (not log: factors stay in
/// `[0, 1]` and there are at most six of them).
fn likelihood_at<S: Scalar>(point: &[S], y: &AdjacencyMatrix) -> S {
    let n = point.len();
    let mut weight = S::one();
    for i in 0..n {
        let start = if y.includes_self_loops() { i } else { i + 1 };
        for j in start..n {
            let p = point[i] * point[j];
            let factor = if y.get(i, j) == 1 { p } else { S::one() - p };
            weight = weight * factor;
            if weight == S::zero() {
                return weight;
            }
        }
    }
    weight
}
