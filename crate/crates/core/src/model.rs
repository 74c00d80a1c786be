//! Domain types for random dot product graphs and stochastic block models,
//! plus the synthetic generators used by the benchmark setups.
//!
//! The latent space is `X = {x in R^d : ||x||_2 <= 1, x >= 0}`, which makes
//! every pairwise dot product a valid Bernoulli edge probability. Latent
//! matrices carry a `constrained` flag recording whether every row has been
//! checked against that space.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::matrix::{dot, DenseMatrix};
use crate::scalar::Scalar;

/// Constraint-check slack for validating externally supplied rows.
const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Returns true when `row` lies in the latent space exactly
/// (`x >= 0`, `||x||^2 <= 1`).
pub fn row_in_latent_space<S: Scalar>(row: &[S]) -> bool {
    row.iter().all(|&v| v >= S::zero()) && dot(row, row) <= S::one()
}

fn row_in_latent_space_slack<S: Scalar>(row: &[S]) -> bool {
    let slack = S::cst(MEMBERSHIP_SLACK);
    row.iter().all(|&v| v >= -slack) && dot(row, row).sqrt() <= S::one() + slack
}

/// An `n x d` matrix of latent positions, one row per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LatentMatrix<S: Scalar = f64> {
    values: DenseMatrix<S>,
    constrained: bool,
}

impl<S: Scalar> LatentMatrix<S> {
    /// Wrap a matrix without any latent-space membership claim.
    pub fn unconstrained(values: DenseMatrix<S>) -> Result<Self> {
        Self::check_shape(&values)?;
        Ok(Self { values, constrained: false })
    }

    /// Wrap a matrix whose rows must all lie in the latent space
    /// (with a small slack for round-off on the boundary).
    pub fn constrained(values: DenseMatrix<S>) -> Result<Self> {
        Self::check_shape(&values)?;
        for i in 0..values.nrows() {
            if !row_in_latent_space_slack(values.row(i)) {
                return Err(Error::InvalidArgument(format!(
                    "row {i} is outside the latent space"
                )));
            }
        }
        Ok(Self { values, constrained: true })
    }

    fn check_shape(values: &DenseMatrix<S>) -> Result<()> {
        let (n, d) = (values.nrows(), values.ncols());
        if n < 1 || d < 1 || d > n {
            return Err(Error::InvalidArgument(format!(
                "latent matrix needs 1 <= d <= n, got n={n}, d={d}"
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.values.ncols()
    }

    #[inline]
    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[S] {
        self.values.row(i)
    }

    #[inline]
    pub fn values(&self) -> &DenseMatrix<S> {
        &self.values
    }

    pub fn into_values(self) -> DenseMatrix<S> {
        self.values
    }

    /// Edge-probability matrix `X Xᵀ`.
    pub fn edge_probabilities(&self) -> EdgeProbMatrix<S> {
        EdgeProbMatrix { values: self.values.gram() }
    }
}

/// Observed adjacency matrix: symmetric, binary, with a flag recording
/// whether the diagonal is part of the model (self-loops) or identically
/// zero (hollow mode).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    n: usize,
    values: Vec<u8>,
    includes_self_loops: bool,
}

impl AdjacencyMatrix {
    /// Build from row-major binary entries; checks symmetry, binaryness, and
    /// a zero diagonal in hollow mode.
    pub fn from_entries(n: usize, values: Vec<u8>, includes_self_loops: bool) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "adjacency needs {n}x{n} entries, got {}",
                values.len()
            )));
        }
        for (idx, &v) in values.iter().enumerate() {
            if v > 1 {
                return Err(Error::InvalidArgument(format!(
                    "adjacency entry at flat index {idx} is {v}, not 0/1"
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if values[i * n + j] != values[j * n + i] {
                    return Err(Error::NotSymmetric(1.0));
                }
            }
            if !includes_self_loops && values[i * n + i] != 0 {
                return Err(Error::InvalidArgument(format!(
                    "hollow adjacency has a self-loop at vertex {i}"
                )));
            }
        }
        Ok(Self { n, values, includes_self_loops })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn includes_self_loops(&self) -> bool {
        self.includes_self_loops
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u8] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Number of edges, counting pairs once (and self-loops once).
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for i in 0..self.n {
            for j in i..self.n {
                count += usize::from(self.get(i, j));
            }
        }
        count
    }

    pub fn to_dense<S: Scalar>(&self) -> DenseMatrix<S> {
        let data = self.values.iter().map(|&v| S::cst(f64::from(v))).collect();
        DenseMatrix::from_vec(self.n, self.n, data).expect("square by construction")
    }
}

/// Symmetric real matrix of edge probabilities (`P = X Xᵀ` or a posterior
/// mean thereof).
///
/// Symmetry is enforced at construction; the `[0, 1]` entry range holds for
/// anything built from constrained latent positions and is checked separately
/// via [`EdgeProbMatrix::validate_unit_range`], because the Gaussian-likelihood
/// chain legitimately averages unconstrained products.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EdgeProbMatrix<S: Scalar = f64> {
    values: DenseMatrix<S>,
}

impl<S: Scalar> EdgeProbMatrix<S> {
    pub fn new(values: DenseMatrix<S>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::ShapeMismatch("edge-probability matrix must be square".into()));
        }
        let asym = values.max_asymmetry();
        if asym > S::cst(1e-10) {
            return Err(Error::NotSymmetric(asym.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { values })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    #[inline]
    pub fn values(&self) -> &DenseMatrix<S> {
        &self.values
    }

    pub fn into_values(self) -> DenseMatrix<S> {
        self.values
    }

    /// Check every entry lies in `[-tol, 1 + tol]`.
    pub fn validate_unit_range(&self, tol: S) -> Result<()> {
        for &v in self.values.data() {
            if v < -tol || v > S::one() + tol {
                return Err(Error::InvalidArgument(format!(
                    "edge probability {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// How block labels are produced when expanding an SBM to latent positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub enum BlockAssignment<S: Scalar = f64> {
    /// Labels drawn independently from these block probabilities.
    Proportions(Vec<S>),
    /// Explicit 1-based label per vertex.
    Explicit(Vec<usize>),
}

/// Stochastic block model given by per-block latent positions.
///
/// The block probability matrix is `B = L Lᵀ` where `L` stacks the block
/// positions, so `B` is automatically positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SbmSpec<S: Scalar = f64> {
    block_positions: DenseMatrix<S>,
    assignment: BlockAssignment<S>,
}

impl<S: Scalar> SbmSpec<S> {
    /// Blocks at the given positions (rows), labels drawn from `proportions`.
    pub fn new(block_positions: DenseMatrix<S>, proportions: Vec<S>) -> Result<Self> {
        let k = block_positions.nrows();
        if proportions.len() != k {
            return Err(Error::ShapeMismatch(format!(
                "{k} blocks but {} proportions",
                proportions.len()
            )));
        }
        if proportions.iter().any(|&p| p < S::zero()) {
            return Err(Error::InvalidArgument("negative block proportion".into()));
        }
        let total: S = proportions.iter().copied().sum();
        if (total - S::one()).abs() > S::cst(1e-9) {
            return Err(Error::InvalidArgument(format!(
                "block proportions sum to {total}, expected 1"
            )));
        }
        Self::validate_positions(&block_positions)?;
        Ok(Self { block_positions, assignment: BlockAssignment::Proportions(proportions) })
    }

    /// Blocks at the given positions with a fixed 1-based assignment vector.
    pub fn with_explicit_assignment(
        block_positions: DenseMatrix<S>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let k = block_positions.nrows();
        if let Some(&bad) = labels.iter().find(|&&l| l < 1 || l > k) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} outside 1..={k}"
            )));
        }
        Self::validate_positions(&block_positions)?;
        Ok(Self { block_positions, assignment: BlockAssignment::Explicit(labels) })
    }

    fn validate_positions(positions: &DenseMatrix<S>) -> Result<()> {
        for i in 0..positions.nrows() {
            if !row_in_latent_space_slack(positions.row(i)) {
                return Err(Error::InvalidArgument(format!(
                    "block position {i} is outside the latent space"
                )));
            }
        }
        // Membership already bounds every dot product to [0, 1]; this is a
        // plain sanity check that the implied B is a probability matrix.
        let b = positions.gram();
        let slack = S::cst(MEMBERSHIP_SLACK);
        for &v in b.data() {
            if v < -slack || v > S::one() + slack {
                return Err(Error::InvalidArgument(format!(
                    "block probability {v} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.block_positions.nrows()
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.block_positions.ncols()
    }

    #[inline]
    pub fn block_positions(&self) -> &DenseMatrix<S> {
        &self.block_positions
    }

    #[inline]
    pub fn assignment(&self) -> &BlockAssignment<S> {
        &self.assignment
    }

    /// Block probability matrix `B = L Lᵀ`.
    pub fn block_matrix(&self) -> DenseMatrix<S> {
        self.block_positions.gram()
    }
}

/// Sample an adjacency matrix from the dot-product graph over `latent`,
/// including the diagonal (`y_ii ~ Bernoulli(x_iᵀx_i)`).
pub fn sample_rdpg<S: Scalar>(latent: &LatentMatrix<S>, seed: u64) -> Result<AdjacencyMatrix> {
    sample_rdpg_mode(latent, seed, true)
}

/// Sample without self-loops: only pairs `i < j` are drawn, the diagonal
/// stays zero, and the result is flagged hollow.
pub fn sample_rdpg_hollow<S: Scalar>(
    latent: &LatentMatrix<S>,
    seed: u64,
) -> Result<AdjacencyMatrix> {
    sample_rdpg_mode(latent, seed, false)
}

fn sample_rdpg_mode<S: Scalar>(
    latent: &LatentMatrix<S>,
    seed: u64,
    self_loops: bool,
) -> Result<AdjacencyMatrix> {
    if !latent.is_constrained() {
        return Err(Error::InvalidArgument(
            "sampling requires latent positions in the constrained space".into(),
        ));
    }
    let n = latent.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0u8; n * n];
    for i in 0..n {
        let start = if self_loops { i } else { i + 1 };
        for j in start..n {
            let p = dot(latent.row(i), latent.row(j));
            let u: S = S::unit_uniform(&mut rng);
            let y = u8::from(u < p);
            values[i * n + j] = y;
            values[j * n + i] = y;
        }
    }
    Ok(AdjacencyMatrix { n, values, includes_self_loops: self_loops })
}

/// Expand an SBM to per-vertex latent positions plus the ground-truth
/// cluster assignment.
///
/// With proportional assignment the labels are i.i.d. categorical draws, so
/// block sizes are multinomial; small `n` can leave a block empty, which is
/// allowed.
pub fn sbm_to_latent<S: Scalar>(
    spec: &SbmSpec<S>,
    n: usize,
    seed: u64,
) -> Result<(LatentMatrix<S>, ClusterAssignment<S>)> {
    let k = spec.k();
    if n < k {
        return Err(Error::InvalidArgument(format!("n={n} smaller than K={k}")));
    }
    let labels: Vec<usize> = match spec.assignment() {
        BlockAssignment::Proportions(props) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let u: S = S::unit_uniform(&mut rng);
                    let mut cum = S::zero();
                    for (idx, &p) in props.iter().enumerate() {
                        cum += p;
                        if u < cum {
                            return idx + 1;
                        }
                    }
                    k
                })
                .collect()
        }
        BlockAssignment::Explicit(tau) => {
            if tau.len() != n {
                return Err(Error::ShapeMismatch(format!(
                    "explicit assignment has {} labels, expected {n}",
                    tau.len()
                )));
            }
            tau.clone()
        }
    };

    let d = spec.d();
    let mut values = DenseMatrix::zeros(n, d);
    for (i, &label) in labels.iter().enumerate() {
        values.row_mut(i).copy_from_slice(spec.block_positions().row(label - 1));
    }
    let latent = LatentMatrix::constrained(values)?;
    let truth = ClusterAssignment::new(labels, spec.block_positions().clone(), k)?;
    Ok((latent, truth))
}

/// Factor a symmetric PSD matrix `B` as `L Lᵀ` with `d = rank(B)` columns,
/// ordered by decreasing eigenvalue.
///
/// Uses the symmetric eigendecomposition with eigenvalues clipped at zero, so
/// rank-deficient inputs (block matrices with d < K) are fine; a clearly
/// negative eigenvalue is an error.
pub fn factorize_block_matrix<S: Scalar>(b: &DenseMatrix<S>) -> Result<DenseMatrix<S>> {
    if b.nrows() != b.ncols() {
        return Err(Error::ShapeMismatch("block matrix must be square".into()));
    }
    if !b.is_symmetric_within(S::cst(1e-8)) {
        return Err(Error::NotSymmetric(b.max_asymmetry().to_f64().unwrap_or(f64::NAN)));
    }
    let eig = sym_eigen(b)?;
    if let Some(&lambda) = eig.values.iter().find(|&&l| l < -S::cst(1e-8)) {
        return Err(Error::NotPositiveSemidefinite(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    let scale = eig.values.first().copied().unwrap_or(S::zero()).max(S::one());
    let rank_tol = S::cst(1e-10) * scale;
    let rank = eig.values.iter().filter(|&&l| l > rank_tol).count().max(1);

    let k = b.nrows();
    let mut l = DenseMatrix::zeros(k, rank);
    for j in 0..rank {
        let root = eig.values[j].max(S::zero()).sqrt();
        for i in 0..k {
            l[(i, j)] = eig.vectors[(i, j)] * root;
        }
    }
    Ok(l)
}

/// Point on the Hardy-Weinberg curve `C(t) = [t^2, (1-t)^2, 2t(1-t)]`.
///
/// The image lies in the latent space for every `t` in `[0, 1]`.
pub fn hardy_weinberg_point<S: Scalar>(t: S) -> Result<[S; 3]> {
    if t < S::zero() || t > S::one() {
        return Err(Error::InvalidArgument(format!("t={t} outside [0, 1]")));
    }
    let one_minus = S::one() - t;
    Ok([t * t, one_minus * one_minus, S::cst(2.0) * t * one_minus])
}

/// Latent positions sampled along the Hardy-Weinberg curve with
/// `t_i ~ Unif(0, 1)`; also returns the drawn parameters.
pub fn hardy_weinberg_latent<S: Scalar>(n: usize, seed: u64) -> Result<(LatentMatrix<S>, Vec<S>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = DenseMatrix::zeros(n, 3);
    let mut ts = Vec::with_capacity(n);
    for i in 0..n {
        let t: S = S::unit_uniform(&mut rng);
        let point = hardy_weinberg_point(t)?;
        values.row_mut(i).copy_from_slice(&point);
        ts.push(t);
    }
    Ok((LatentMatrix::constrained(values)?, ts))
}

/// Map every row into the latent space: clip negative coordinates to zero,
/// then rescale the row to unit norm iff its norm exceeds one. Idempotent.
pub fn project_to_latent_space<S: Scalar>(latent: &LatentMatrix<S>) -> LatentMatrix<S> {
    let mut values = latent.values().clone();
    for i in 0..values.nrows() {
        project_row_in_place(values.row_mut(i));
    }
    LatentMatrix { values, constrained: true }
}

/// In-place single-row projection used by both the public op and chain
/// initialization. Guarantees exact membership on return.
pub(crate) fn project_row_in_place<S: Scalar>(row: &mut [S]) {
    for v in row.iter_mut() {
        if *v < S::zero() {
            *v = S::zero();
        }
    }
    let norm_sq = dot(row, row);
    if norm_sq > S::one() {
        let inv = S::one() / norm_sq.sqrt();
        for v in row.iter_mut() {
            *v = *v * inv;
        }
        // Round-off can leave the norm a hair above one; nudge down so the
        // exact membership test holds.
        while dot(row, row) > S::one() {
            let shrink = S::one() - S::epsilon() * S::cst(2.0);
            for v in row.iter_mut() {
                *v = *v * shrink;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn k3_positions() -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&[
            vec![0.3, 0.3],
            vec![0.3, 0.6],
            vec![0.6, 0.3],
        ])
        .unwrap()
    }

    #[test]
    fn sample_rdpg_zero_latent_gives_empty_graph() {
        let x = LatentMatrix::<f64>::constrained(DenseMatrix::zeros(5, 2)).unwrap();
        let y = sample_rdpg(&x, 1).unwrap();
        assert!(y.row(0).iter().chain(y.row(4)).all(|&v| v == 0));
        assert_eq!(y.edge_count(), 0);
    }

    #[test]
    fn sample_rdpg_unit_rows_give_complete_graph() {
        let mut values: DenseMatrix<f64> = DenseMatrix::zeros(4, 2);
        for i in 0..4 {
            values[(i, 0)] = 1.0;
        }
        let x = LatentMatrix::constrained(values).unwrap();
        let y = sample_rdpg(&x, 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(y.get(i, j), 1);
            }
        }
    }

    #[test]
    fn sample_rdpg_rejects_unconstrained() {
        let x = LatentMatrix::<f64>::unconstrained(DenseMatrix::zeros(3, 1)).unwrap();
        assert!(sample_rdpg(&x, 0).is_err());
    }

    #[test]
    fn sample_rdpg_is_symmetric_binary_and_reproducible() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let n = 3 + (trial % 5);
            let mut values = DenseMatrix::zeros(n, 2);
            for i in 0..n {
                for j in 0..2 {
                    values[(i, j)] = rng.gen_range(-0.5..1.0);
                }
                project_row_in_place(values.row_mut(i));
            }
            let x = LatentMatrix::constrained(values).unwrap();
            let y1 = sample_rdpg(&x, trial as u64).unwrap();
            let y2 = sample_rdpg(&x, trial as u64).unwrap();
            assert_eq!(y1, y2, "same seed must give identical draws");
            for i in 0..n {
                for j in 0..n {
                    assert!(y1.get(i, j) <= 1);
                    assert_eq!(y1.get(i, j), y1.get(j, i));
                }
            }
        }
    }

    #[test]
    fn sample_rdpg_block_pair_frequency_matches_dot_product() {
        // Table-setup blocks: p between block 1 and block 2 is
        // 0.3*0.3 + 0.3*0.6 = 0.27.
        let spec = SbmSpec::new(k3_positions(), vec![1.0 / 3.0; 3]).unwrap();
        let (latent, truth) = sbm_to_latent(&spec, 600, 7).unwrap();
        let y = sample_rdpg(&latent, 8).unwrap();
        let (mut edges, mut pairs) = (0usize, 0usize);
        for i in 0..600 {
            for j in 0..600 {
                if truth.labels()[i] == 1 && truth.labels()[j] == 2 {
                    pairs += 1;
                    edges += usize::from(y.get(i, j));
                }
            }
        }
        let p = 0.27;
        let freq = edges as f64 / pairs as f64;
        let sigma = (p * (1.0 - p) / pairs as f64).sqrt();
        assert!((freq - p).abs() <= 3.0 * sigma, "freq {freq} vs {p} (3σ = {})", 3.0 * sigma);
    }

    #[test]
    fn two_vertex_edge_frequency_converges() {
        let values = DenseMatrix::from_rows(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let x = LatentMatrix::constrained(values).unwrap();
        let p = 0.9 * 0.5 + 0.1 * 0.5;
        let resamples = 200;
        let mut total = 0usize;
        for seed in 0..resamples {
            let y = sample_rdpg(&x, seed).unwrap();
            total += usize::from(y.get(0, 1));
        }
        let mean = total as f64 / resamples as f64;
        let bound = 4.0 * (p * (1.0 - p) / resamples as f64).sqrt();
        assert!((mean - p).abs() <= bound, "mean {mean} vs p {p}");
    }

    #[test]
    fn sbm_to_latent_has_k_distinct_rows() {
        let spec = SbmSpec::new(k3_positions(), vec![1.0 / 3.0; 3]).unwrap();
        let (latent, truth) = sbm_to_latent(&spec, 600, 5).unwrap();
        let mut rows: Vec<Vec<u64>> = (0..latent.n())
            .map(|i| latent.row(i).iter().map(|v| v.to_bits()).collect())
            .collect();
        rows.sort();
        rows.dedup();
        assert_eq!(rows.len(), 3);
        assert!(truth.labels().iter().all(|&l| (1..=3).contains(&l)));
    }

    #[test]
    fn sbm_single_block_rows_identical() {
        let positions = DenseMatrix::from_rows(&[vec![0.4, 0.2]]).unwrap();
        let spec = SbmSpec::new(positions, vec![1.0]).unwrap();
        let (latent, _) = sbm_to_latent(&spec, 10, 0).unwrap();
        for i in 1..10 {
            assert_eq!(latent.row(i), latent.row(0));
        }
    }

    #[test]
    fn sbm_explicit_assignment_places_rows() {
        let positions = DenseMatrix::from_rows(&[vec![0.1, 0.0], vec![0.0, 0.9]]).unwrap();
        let spec = SbmSpec::with_explicit_assignment(positions, vec![1, 2, 1, 2]).unwrap();
        let (latent, truth) = sbm_to_latent(&spec, 4, 0).unwrap();
        assert_eq!(latent.row(0), latent.row(2));
        assert_eq!(latent.row(1), latent.row(3));
        assert_ne!(latent.row(0), latent.row(1));
        assert_eq!(truth.labels(), &[1, 2, 1, 2]);
    }

    #[test]
    fn factorize_identity_is_exact() {
        let l = factorize_block_matrix(&DenseMatrix::<f64>::identity(3)).unwrap();
        assert_eq!(l.ncols(), 3);
        let back = l.gram();
        let err = back.sub(&DenseMatrix::identity(3)).unwrap().frobenius_norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn factorize_table_block_matrix_roundtrips() {
        let b = k3_positions().gram();
        let l = factorize_block_matrix(&b).unwrap();
        assert_eq!(l.ncols(), 2, "rank of a 2-dimensional block layout");
        let err = l.gram().sub(&b).unwrap().frobenius_norm();
        assert!(err < 1e-8);
    }

    #[test]
    fn factorize_rejects_indefinite() {
        let mut b = DenseMatrix::<f64>::identity(2);
        b[(1, 1)] = -0.1;
        match factorize_block_matrix(&b) {
            Err(Error::NotPositiveSemidefinite(_)) => {}
            other => panic!("expected PSD error, got {other:?}"),
        }
    }

    #[test]
    fn hardy_weinberg_endpoints_and_midpoint() {
        assert_eq!(hardy_weinberg_point(0.0).unwrap(), [0.0, 1.0, 0.0]);
        assert_eq!(hardy_weinberg_point(1.0).unwrap(), [1.0, 0.0, 0.0]);
        let mid = hardy_weinberg_point(0.5).unwrap();
        assert_eq!(mid, [0.25, 0.25, 0.5]);
        assert!(hardy_weinberg_point(1.5).is_err());
        assert!(hardy_weinberg_point(-0.1).is_err());
    }

    #[test]
    fn hardy_weinberg_curve_stays_in_latent_space() {
        for k in 0..=1000 {
            let t = k as f64 / 1000.0;
            let p = hardy_weinberg_point(t).unwrap();
            assert!(row_in_latent_space_slack(&p), "t={t} point {p:?}");
        }
    }

    #[test]
    fn projection_examples_and_idempotence() {
        let raw = DenseMatrix::<f64>::from_rows(&[
            vec![-0.3, 0.4],
            vec![3.0, 4.0],
            vec![0.2, 0.1],
        ])
        .unwrap();
        let x = LatentMatrix::unconstrained(raw).unwrap();
        let proj = project_to_latent_space(&x);
        assert!((proj.row(0)[0] - 0.0).abs() < 1e-15);
        assert!((proj.row(0)[1] - 0.4).abs() < 1e-15);
        assert!((proj.row(1)[0] - 0.6).abs() < 1e-12);
        assert!((proj.row(1)[1] - 0.8).abs() < 1e-12);
        assert_eq!(proj.row(2), &[0.2, 0.1], "rows already inside are untouched");

        let twice = project_to_latent_space(&proj);
        assert_eq!(twice.values(), proj.values());
        for i in 0..3 {
            assert!(row_in_latent_space(twice.row(i)));
        }
    }

    #[test]
    fn hollow_sampling_keeps_diagonal_zero() {
        let mut values = DenseMatrix::zeros(4, 2);
        for i in 0..4 {
            values[(i, 0)] = 0.9;
        }
        let x = LatentMatrix::constrained(values).unwrap();
        let y = sample_rdpg_hollow(&x, 3).unwrap();
        assert!(!y.includes_self_loops());
        for i in 0..4 {
            assert_eq!(y.get(i, i), 0);
        }
    }
}
