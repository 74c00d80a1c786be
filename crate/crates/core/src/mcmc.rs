//! Metropolis-Hastings sampler over latent positions.
//!
//! One iteration is a full sweep of single-vertex random-walk proposals
//! `x_i' = x_i + step * eps`, each accepted with probability
//! `min(1, exp(Δloglik + Δlogprior))` computed through the `O(n d)` row
//! deltas in [`crate::likelihood`]. Two targets share the sweep:
//!
//! - `Pse`: exact Bernoulli likelihood; proposals outside the constrained
//!   latent space are rejected outright, so every visited state stays in it.
//! - `Gse`: Gaussian working likelihood over unconstrained positions.
//!
//! The step size adapts by Robbins-Monro on its logarithm toward a 0.234
//! acceptance rate during burn-in and is frozen afterwards, keeping the
//! post-burn-in kernel fixed. Every proposal consumes the same RNG budget
//! (d normals plus one uniform) whether or not the likelihood is evaluated,
//! so runs are bit-reproducible from the seed alone.
//!
//! The posterior mean of `X Xᵀ` accumulates over retained (post-burn-in,
//! thinned) states only; its top-d eigenpairs give the spectral point
//! estimator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::likelihood::{
    bernoulli_row_delta_raw, gaussian_row_delta_raw, log_prior_row_delta, PriorSpec,
};
use crate::matrix::DenseMatrix;
use crate::model::{
    project_to_latent_space, row_in_latent_space, AdjacencyMatrix, EdgeProbMatrix, LatentMatrix,
};
use crate::scalar::Scalar;
use crate::spectral::{adjacency_spectral_embedding, top_eigen};

const TARGET_ACCEPTANCE: f64 = 0.234;
const CHECKPOINT_FORMAT_VERSION: u32 = 1;

/// Which posterior the chain targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainTarget {
    /// Bernoulli likelihood on the constrained latent space.
    Pse,
    /// Gaussian working likelihood, unconstrained positions.
    Gse,
}

/// Sampler knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ChainConfig<S: Scalar = f64> {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub step_size: S,
    pub seed: u64,
    pub adapt: bool,
    pub target: ChainTarget,
    /// Cap on stored retained samples; the running mean of `X Xᵀ` always
    /// covers every retained state regardless.
    pub retain_cap: Option<usize>,
}

impl<S: Scalar> ChainConfig<S> {
    pub fn pse(seed: u64) -> Self {
        Self {
            iterations: 15_000,
            burn_in: 5_000,
            thin: 10,
            step_size: S::cst(0.05),
            seed,
            adapt: true,
            target: ChainTarget::Pse,
            retain_cap: None,
        }
    }

    pub fn gse(seed: u64) -> Self {
        Self { target: ChainTarget::Gse, ..Self::pse(seed) }
    }

    /// Number of retained samples implied by the iteration arithmetic.
    pub fn retained_count(&self) -> usize {
        if self.thin == 0 || self.iterations <= self.burn_in {
            0
        } else {
            (self.iterations - self.burn_in) / self.thin
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin < 1 {
            return Err(Error::InvalidChainConfig("thin must be >= 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidChainConfig(format!(
                "burn_in {} must be smaller than iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.retained_count() == 0 {
            return Err(Error::InvalidChainConfig("no retained samples".into()));
        }
        if !(self.step_size > S::zero()) {
            return Err(Error::InvalidChainConfig("step_size must be positive".into()));
        }
        Ok(())
    }
}

/// Chain output: the posterior mean of the edge-probability matrix, the
/// retained samples (up to the storage cap), and acceptance diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PosteriorSummary<S: Scalar = f64> {
    pub mean_p: EdgeProbMatrix<S>,
    pub retained: Vec<LatentMatrix<S>>,
    /// Retained-state count accumulated into `mean_p` (equals the config
    /// arithmetic even when storage is capped).
    pub retained_count: usize,
    pub acceptance_rate: f64,
    pub per_vertex_acceptance: Vec<f64>,
    /// Step size in force at each iteration; constant from `burn_in` on.
    pub step_size_trace: Vec<S>,
}

/// A Metropolis-Hastings run in progress; supports checkpointing.
pub struct Chain<'a, S: Scalar = f64> {
    y: &'a AdjacencyMatrix,
    prior: PriorSpec<S>,
    cfg: ChainConfig<S>,
    d: usize,
    state: DenseMatrix<S>,
    sweep: usize,
    step_size: S,
    p_sum: DenseMatrix<S>,
    retained_count: usize,
    retained: Vec<LatentMatrix<S>>,
    accepted_total: u64,
    accepted_per_vertex: Vec<u64>,
    step_trace: Vec<S>,
    rng: ChaCha8Rng,
    rng_seed: [u8; 32],
}

impl<'a, S: Scalar> Chain<'a, S> {
    /// Set up a chain. Without an explicit `init` the state starts from the
    /// adjacency spectral embedding of `y`, projected into the latent space
    /// for a `Pse` target.
    pub fn new(
        y: &'a AdjacencyMatrix,
        d: usize,
        prior: &PriorSpec<S>,
        cfg: &ChainConfig<S>,
        init: Option<&LatentMatrix<S>>,
    ) -> Result<Self> {
        cfg.validate()?;
        let n = y.n();
        if d < 1 || d > n {
            return Err(Error::InvalidArgument(format!("d={d} outside 1..={n}")));
        }

        let state = match init {
            Some(latent) => {
                if latent.n() != n || latent.d() != d {
                    return Err(Error::ShapeMismatch(format!(
                        "init is {}x{}, expected {n}x{d}",
                        latent.n(),
                        latent.d()
                    )));
                }
                if cfg.target == ChainTarget::Pse {
                    for i in 0..n {
                        if !row_in_latent_space(latent.row(i)) {
                            return Err(Error::InvalidArgument(format!(
                                "Pse init row {i} is outside the latent space"
                            )));
                        }
                    }
                }
                latent.values().clone()
            }
            None => {
                let ase = adjacency_spectral_embedding(&y.to_dense::<S>(), d)?;
                match cfg.target {
                    ChainTarget::Pse => project_to_latent_space(&ase).into_values(),
                    ChainTarget::Gse => ase.into_values(),
                }
            }
        };

        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let rng_seed = rng.get_seed();
        Ok(Self {
            y,
            prior: *prior,
            cfg: cfg.clone(),
            d,
            state,
            sweep: 0,
            step_size: cfg.step_size,
            p_sum: DenseMatrix::zeros(n, n),
            retained_count: 0,
            retained: Vec::new(),
            accepted_total: 0,
            accepted_per_vertex: vec![0; n],
            step_trace: Vec::with_capacity(cfg.iterations),
            rng,
            rng_seed,
        })
    }

    #[inline]
    pub fn completed_sweeps(&self) -> usize {
        self.sweep
    }

    #[inline]
    pub fn current_state(&self) -> &DenseMatrix<S> {
        &self.state
    }

    fn one_sweep(&mut self) {
        let n = self.y.n();
        let d = self.d;
        let pse = self.cfg.target == ChainTarget::Pse;
        let mut proposal = vec![S::zero(); d];
        let mut accepted_this_sweep = 0usize;

        for i in 0..n {
            // Fixed RNG budget per proposal: d normals then one uniform, drawn
            // before any rejection short-circuit.
            {
                let row = self.state.row(i);
                for (p, &cur) in proposal.iter_mut().zip(row) {
                    *p = cur + self.step_size * S::standard_normal(&mut self.rng);
                }
            }
            let u: S = S::unit_uniform(&mut self.rng);

            let mut log_ratio = log_prior_row_delta(self.state.row(i), &proposal, &self.prior);
            if log_ratio > S::neg_infinity() {
                if pse && !row_in_latent_space(&proposal) {
                    log_ratio = S::neg_infinity();
                } else {
                    let dll = if pse {
                        bernoulli_row_delta_raw(&self.state, self.y, i, &proposal)
                    } else {
                        gaussian_row_delta_raw(&self.state, self.y, i, &proposal)
                    };
                    log_ratio += dll;
                }
            }

            let accept = log_ratio >= S::zero() || u.ln() < log_ratio;
            if accept {
                self.state.row_mut(i).copy_from_slice(&proposal);
                self.accepted_total += 1;
                self.accepted_per_vertex[i] += 1;
                accepted_this_sweep += 1;
            }
        }

        self.step_trace.push(self.step_size);
        self.sweep += 1;

        // Robbins-Monro adaptation of log step size during burn-in only.
        if self.cfg.adapt && self.sweep <= self.cfg.burn_in {
            let rate = accepted_this_sweep as f64 / n as f64;
            let gamma = (self.sweep as f64).powf(-0.6);
            let mut log_step = self.step_size.ln() + S::cst(gamma * (rate - TARGET_ACCEPTANCE));
            let (lo, hi) = (S::cst(-18.0), S::cst(5.0));
            log_step = log_step.max(lo).min(hi);
            self.step_size = log_step.exp();
        }

        if self.sweep > self.cfg.burn_in && (self.sweep - self.cfg.burn_in) % self.cfg.thin == 0 {
            self.retain_current();
        }
    }

    fn retain_current(&mut self) {
        let n = self.y.n();
        // Accumulate X Xᵀ without materializing it.
        for i in 0..n {
            let ri = self.state.row(i).to_vec();
            for j in i..n {
                let mut acc = S::zero();
                for (a, &b) in ri.iter().zip(self.state.row(j)) {
                    acc += *a * b;
                }
                self.p_sum[(i, j)] += acc;
                if j != i {
                    self.p_sum[(j, i)] += acc;
                }
            }
        }
        self.retained_count += 1;

        let cap = self.cfg.retain_cap.unwrap_or(usize::MAX);
        if self.retained.len() < cap {
            let snapshot = self.state.clone();
            let sample = match self.cfg.target {
                ChainTarget::Pse => LatentMatrix::constrained(snapshot),
                ChainTarget::Gse => LatentMatrix::unconstrained(snapshot),
            }
            .expect("chain state has valid shape and membership");
            self.retained.push(sample);
        }
    }

    /// Advance to the given sweep count (at most `cfg.iterations`).
    pub fn run_to(&mut self, sweeps: usize) {
        let target = sweeps.min(self.cfg.iterations);
        while self.sweep < target {
            self.one_sweep();
        }
    }

    /// Run any remaining sweeps and summarize.
    pub fn finish(mut self) -> Result<PosteriorSummary<S>> {
        self.run_to(self.cfg.iterations);
        let n = self.y.n();
        if self.retained_count == 0 {
            return Err(Error::InvalidChainConfig("no retained samples".into()));
        }
        let mean_p = EdgeProbMatrix::new(
            self.p_sum.scale(S::one() / S::cst(self.retained_count as f64)),
        )?;
        let total_proposals = (n * self.sweep) as f64;
        Ok(PosteriorSummary {
            mean_p,
            retained: self.retained,
            retained_count: self.retained_count,
            acceptance_rate: self.accepted_total as f64 / total_proposals,
            per_vertex_acceptance: self
                .accepted_per_vertex
                .iter()
                .map(|&a| a as f64 / self.sweep as f64)
                .collect(),
            step_size_trace: self.step_trace,
        })
    }

    /// Snapshot everything needed to resume this chain later. Retained
    /// samples are not part of the checkpoint; a resumed chain stores only
    /// samples retained after the resume point, while the `X Xᵀ` accumulator
    /// carries the full history.
    pub fn checkpoint(&self) -> ChainCheckpoint<S> {
        ChainCheckpoint {
            format_version: CHECKPOINT_FORMAT_VERSION,
            cfg: self.cfg.clone(),
            prior: self.prior,
            d: self.d,
            sweep: self.sweep,
            state: self.state.clone(),
            p_sum: self.p_sum.clone(),
            retained_count: self.retained_count,
            accepted_total: self.accepted_total,
            accepted_per_vertex: self.accepted_per_vertex.clone(),
            step_size: self.step_size,
            step_trace: self.step_trace.clone(),
            rng_seed: self.rng_seed.to_vec(),
            rng_word_pos: self.rng.get_word_pos(),
        }
    }

    /// Rebuild a chain from a checkpoint against the same adjacency matrix.
    pub fn resume(y: &'a AdjacencyMatrix, ckpt: ChainCheckpoint<S>) -> Result<Self> {
        if ckpt.format_version != CHECKPOINT_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported checkpoint version {}",
                ckpt.format_version
            )));
        }
        if ckpt.state.nrows() != y.n() {
            return Err(Error::ShapeMismatch(format!(
                "checkpoint has {} vertices, adjacency has {}",
                ckpt.state.nrows(),
                y.n()
            )));
        }
        let seed: [u8; 32] = ckpt
            .rng_seed
            .as_slice()
            .try_into()
            .map_err(|_| Error::InvalidArgument("checkpoint RNG seed must be 32 bytes".into()))?;
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_word_pos(ckpt.rng_word_pos);
        Ok(Self {
            y,
            prior: ckpt.prior,
            cfg: ckpt.cfg,
            d: ckpt.d,
            state: ckpt.state,
            sweep: ckpt.sweep,
            step_size: ckpt.step_size,
            p_sum: ckpt.p_sum,
            retained_count: ckpt.retained_count,
            retained: Vec::new(),
            accepted_total: ckpt.accepted_total,
            accepted_per_vertex: ckpt.accepted_per_vertex,
            step_trace: ckpt.step_trace,
            rng,
            rng_seed: seed,
        })
    }
}

/// Versioned, losslessly round-trippable chain state dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ChainCheckpoint<S: Scalar = f64> {
    pub format_version: u32,
    pub cfg: ChainConfig<S>,
    pub prior: PriorSpec<S>,
    pub d: usize,
    pub sweep: usize,
    pub state: DenseMatrix<S>,
    pub p_sum: DenseMatrix<S>,
    pub retained_count: usize,
    pub accepted_total: u64,
    pub accepted_per_vertex: Vec<u64>,
    pub step_size: S,
    pub step_trace: Vec<S>,
    pub rng_seed: Vec<u8>,
    pub rng_word_pos: u128,
}

impl<S: Scalar> ChainCheckpoint<S> {
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), self)?;
        Ok(())
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
    }
}

/// Run a full chain and summarize it.
pub fn run_chain<S: Scalar>(
    y: &AdjacencyMatrix,
    d: usize,
    prior: &PriorSpec<S>,
    cfg: &ChainConfig<S>,
    init: Option<&LatentMatrix<S>>,
) -> Result<PosteriorSummary<S>> {
    Chain::new(y, d, prior, cfg, init)?.finish()
}

/// Gaussian-likelihood chain with the `N(0, sigma^2 I)` prior; everything
/// else (initialization, retention, point estimation) mirrors [`run_chain`].
pub fn run_gse_chain<S: Scalar>(
    y: &AdjacencyMatrix,
    d: usize,
    sigma: S,
    cfg: &ChainConfig<S>,
) -> Result<PosteriorSummary<S>> {
    let prior = PriorSpec::gaussian(sigma)?;
    let mut cfg = cfg.clone();
    cfg.target = ChainTarget::Gse;
    run_chain(y, d, &prior, &cfg, None)
}

/// Spectral point estimator: top-`d` eigenpairs of the posterior mean
/// edge-probability matrix, eigenvalues clipped at zero, `X̂ = Û Ŝ^{1/2}`.
pub fn point_estimator<S: Scalar>(
    summary: &PosteriorSummary<S>,
    d: usize,
) -> Result<LatentMatrix<S>> {
    let n = summary.mean_p.n();
    if d > n {
        return Err(Error::InvalidArgument(format!("d={d} exceeds matrix size {n}")));
    }
    let pairs = top_eigen(summary.mean_p.values(), d)?;
    let mut embedding = DenseMatrix::zeros(n, d);
    for j in 0..d {
        let root = pairs.values[j].max(S::zero()).sqrt();
        for i in 0..n {
            embedding[(i, j)] = pairs.vectors[(i, j)] * root;
        }
    }
    LatentMatrix::unconstrained(embedding)
}
