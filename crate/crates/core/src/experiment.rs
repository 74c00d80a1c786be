//! Benchmark harness: generate → embed → align → cluster → evaluate, with
//! replicate aggregation and plot-data export.
//!
//! Built-in setups carry the block-model layouts and vertex counts of the
//! simulation study this crate reproduces; an edge-list setup runs the same
//! pipeline on real data (internal diagnostics only, unless a label file
//! supplies ground truth). Every statistic is reproducible from the spec and
//! its seed; replicates run on a worker pool with derived seed substreams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::align::procrustes;
use crate::cluster::{kmeans, min_permutation_hamming, rand_index, MAX_EXACT_K};
use crate::error::{Error, Result};
use crate::graphio::{read_edge_list, read_labels};
use crate::likelihood::PriorSpec;
use crate::matrix::DenseMatrix;
use crate::mcmc::{point_estimator, run_chain, ChainConfig, ChainTarget};
use crate::model::{
    hardy_weinberg_latent, hardy_weinberg_point, project_to_latent_space, sample_rdpg,
    sample_rdpg_hollow, AdjacencyMatrix, LatentMatrix, SbmSpec,
};
use crate::scalar::Scalar;
use crate::seeding::substream;
use crate::spectral::{adjacency_spectral_embedding, elbow_dimension, singular_values};

const RESULT_FORMAT_VERSION: u32 = 1;

/// Data-generating setup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetupKind {
    SbmTable1K3,
    SbmTable1K5,
    SbmTable1K7,
    HardyWeinberg,
    EdgeListFile(PathBuf),
}

impl SetupKind {
    pub fn parse(name: &str, edge_list: Option<PathBuf>) -> Result<Self> {
        match name {
            "sbm_table1_k3" => Ok(Self::SbmTable1K3),
            "sbm_table1_k5" => Ok(Self::SbmTable1K5),
            "sbm_table1_k7" => Ok(Self::SbmTable1K7),
            "hardy_weinberg" => Ok(Self::HardyWeinberg),
            "edge_list_file" => edge_list
                .map(Self::EdgeListFile)
                .ok_or_else(|| Error::InvalidArgument("edge_list_file needs --edge-list".into())),
            other => Err(Error::InvalidArgument(format!("unknown setup '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::SbmTable1K3 => "sbm_table1_k3",
            Self::SbmTable1K5 => "sbm_table1_k5",
            Self::SbmTable1K7 => "sbm_table1_k7",
            Self::HardyWeinberg => "hardy_weinberg",
            Self::EdgeListFile(_) => "edge_list_file",
        }
    }

    /// Block positions for the SBM setups (rows are blocks).
    pub fn block_positions<S: Scalar>(&self) -> Option<DenseMatrix<S>> {
        let rows: &[[f64; 2]] = match self {
            Self::SbmTable1K3 => &[[0.3, 0.3], [0.3, 0.6], [0.6, 0.3]],
            Self::SbmTable1K5 => &[[0.3, 0.3], [0.3, 0.7], [0.7, 0.3], [0.7, 0.7], [0.5, 0.5]],
            Self::SbmTable1K7 => &[
                [0.2, 0.2],
                [0.2, 0.5],
                [0.2, 0.7],
                [0.5, 0.2],
                [0.5, 0.5],
                [0.5, 0.7],
                [0.7, 0.2],
            ],
            _ => return None,
        };
        let data: Vec<S> = rows.iter().flatten().map(|&v| S::cst(v)).collect();
        Some(DenseMatrix::from_vec(rows.len(), 2, data).expect("static layout"))
    }

    pub fn sbm_spec<S: Scalar>(&self) -> Option<SbmSpec<S>> {
        let positions = self.block_positions::<S>()?;
        let k = positions.nrows();
        let prop = S::one() / S::cst(k as f64);
        Some(SbmSpec::new(positions, vec![prop; k]).expect("static layout is valid"))
    }

    pub fn default_n(&self) -> usize {
        match self {
            Self::SbmTable1K3 => 600,
            Self::SbmTable1K5 => 1000,
            Self::SbmTable1K7 => 1400,
            Self::HardyWeinberg => 2000,
            Self::EdgeListFile(_) => 0,
        }
    }

    pub fn default_d(&self) -> usize {
        match self {
            Self::HardyWeinberg => 3,
            _ => 2,
        }
    }

    pub fn block_count(&self) -> Option<usize> {
        match self {
            Self::SbmTable1K3 => Some(3),
            Self::SbmTable1K5 => Some(5),
            Self::SbmTable1K7 => Some(7),
            _ => None,
        }
    }
}

/// Embedding method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    Ase,
    Pse,
    Gse,
}

impl Method {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ase" => Ok(Self::Ase),
            "pse" => Ok(Self::Pse),
            "gse" => Ok(Self::Gse),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Ase => "ase",
            Self::Pse => "pse",
            Self::Gse => "gse",
        }
    }
}

/// Embedding dimension: fixed, or picked per replicate by the scree elbow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimensionSpec {
    Fixed(usize),
    Auto,
}

/// Full experiment description; a result echoes it so runs can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExperimentSpec<S: Scalar = f64> {
    pub setup: SetupKind,
    pub n: usize,
    pub d: DimensionSpec,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub chain: ChainConfig<S>,
    pub gaussian_sigma: S,
    pub kmeans_k: Option<usize>,
    pub kmeans_restarts: usize,
    pub seed: u64,
    /// Sample the diagonal (`y_ii`) of synthetic graphs; matches the
    /// likelihood's pair range.
    pub self_loops: bool,
    pub labels_path: Option<PathBuf>,
    /// Fail instead of silently skipping loss/Rand-index when the setup has
    /// no ground truth.
    pub require_truth_metrics: bool,
}

impl<S: Scalar> ExperimentSpec<S> {
    /// Paper-scale defaults for a setup: its `n`, its `d`, all three methods,
    /// one replicate, the standard chain configuration.
    pub fn for_setup(setup: SetupKind, seed: u64) -> Self {
        let n = setup.default_n();
        let d = setup.default_d();
        let kmeans_k = setup.block_count();
        let synthetic = !matches!(setup, SetupKind::EdgeListFile(_));
        Self {
            setup,
            n,
            d: DimensionSpec::Fixed(d),
            methods: vec![Method::Ase, Method::Pse, Method::Gse],
            replicates: 1,
            chain: ChainConfig::pse(seed),
            gaussian_sigma: S::cst(10.0),
            kmeans_k,
            kmeans_restarts: 20,
            seed,
            self_loops: true,
            labels_path: None,
            require_truth_metrics: synthetic,
        }
    }

    /// Desk-scale shrink: multiply `n` and the chain length by `scale`,
    /// keeping the thinning interval.
    pub fn apply_scale(&mut self, scale: f64) -> Result<()> {
        if !(scale > 0.0) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {scale}")));
        }
        let min_n = self.kmeans_k.unwrap_or(1).max(2);
        self.n = ((self.n as f64 * scale).round() as usize).max(min_n);
        self.chain.iterations = ((self.chain.iterations as f64 * scale).round() as usize).max(2);
        self.chain.burn_in = (self.chain.burn_in as f64 * scale).round() as usize;
        if self.chain.retained_count() == 0 {
            self.chain.iterations = self.chain.burn_in + self.chain.thin;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidArgument("replicates must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods requested".into()));
        }
        let synthetic = !matches!(self.setup, SetupKind::EdgeListFile(_));
        if synthetic && self.n < 1 {
            return Err(Error::InvalidArgument("n must be >= 1".into()));
        }
        if !synthetic && self.require_truth_metrics && self.labels_path.is_none() {
            return Err(Error::InvalidArgument(
                "edge-list setup has no ground truth: latent-position losses are \
                 undefined and the Rand index needs --labels"
                    .into(),
            ));
        }
        if self.methods.iter().any(|m| *m != Method::Ase) {
            self.chain.validate()?;
        }
        Ok(())
    }
}

/// Per-replicate, per-method measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub d_used: usize,
    pub loss: Option<f64>,
    pub rand_index: Option<f64>,
    pub misclustered: Option<usize>,
    pub cluster_sizes: Vec<usize>,
    pub wall_secs: f64,
}

/// Aggregates over replicates for one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodStats {
    pub loss_mean: Option<f64>,
    pub loss_sd: Option<f64>,
    pub rand_index_mean: Option<f64>,
    pub rand_index_sd: Option<f64>,
    pub misclustered_mean: Option<f64>,
    pub wall_secs_mean: f64,
    pub replicates: Vec<ReplicateOutcome>,
}

/// Result file contents: spec echo plus per-method statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExperimentResult<S: Scalar = f64> {
    pub format_version: u32,
    pub spec: ExperimentSpec<S>,
    pub per_method: BTreeMap<String, MethodStats>,
}

impl<S: Scalar> ExperimentResult<S> {
    pub fn stats(&self, method: Method) -> Option<&MethodStats> {
        self.per_method.get(method.name())
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    /// Flat CSV companion: one row per (method, replicate).
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "method,replicate,d,loss,rand_index,misclustered,wall_secs")?;
        for (method, stats) in &self.per_method {
            for rep in &stats.replicates {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    method,
                    rep.replicate,
                    rep.d_used,
                    rep.loss.map_or(String::new(), |v| v.to_string()),
                    rep.rand_index.map_or(String::new(), |v| v.to_string()),
                    rep.misclustered.map_or(String::new(), |v| v.to_string()),
                    rep.wall_secs,
                )?;
            }
        }
        Ok(())
    }

    /// Canonical JSON with timings zeroed: two runs of the same spec and seed
    /// produce identical fingerprints.
    pub fn fingerprint(&self) -> Result<String> {
        let mut copy = self.clone();
        for stats in copy.per_method.values_mut() {
            stats.wall_secs_mean = 0.0;
            for rep in &mut stats.replicates {
                rep.wall_secs = 0.0;
            }
        }
        Ok(serde_json::to_string(&copy)?)
    }
}

struct ReplicateData<S: Scalar> {
    y: AdjacencyMatrix,
    truth_latent: Option<DenseMatrix<S>>,
    truth_labels: Option<Vec<usize>>,
}

fn generate_replicate<S: Scalar>(
    spec: &ExperimentSpec<S>,
    shared: Option<&ReplicateData<S>>,
    rep: usize,
) -> Result<ReplicateData<S>> {
    let gen_seed = substream(spec.seed, 2 * rep as u64);
    let graph_seed = substream(spec.seed, 2 * rep as u64 + 1);
    let sample = |latent: &LatentMatrix<S>| {
        if spec.self_loops {
            sample_rdpg(latent, graph_seed)
        } else {
            sample_rdpg_hollow(latent, graph_seed)
        }
    };
    match &spec.setup {
        SetupKind::EdgeListFile(_) => {
            let shared = shared.expect("edge-list data preloaded");
            Ok(ReplicateData {
                y: shared.y.clone(),
                truth_latent: None,
                truth_labels: shared.truth_labels.clone(),
            })
        }
        SetupKind::HardyWeinberg => {
            let (latent, _ts) = hardy_weinberg_latent::<S>(spec.n, gen_seed)?;
            Ok(ReplicateData {
                y: sample(&latent)?,
                truth_latent: Some(latent.into_values()),
                truth_labels: None,
            })
        }
        sbm => {
            let spec_sbm = sbm.sbm_spec::<S>().expect("SBM setup");
            let (latent, truth) = crate::model::sbm_to_latent(&spec_sbm, spec.n, gen_seed)?;
            Ok(ReplicateData {
                y: sample(&latent)?,
                truth_latent: Some(latent.into_values()),
                truth_labels: Some(truth.labels().to_vec()),
            })
        }
    }
}

fn run_replicate<S: Scalar>(
    spec: &ExperimentSpec<S>,
    shared: Option<&ReplicateData<S>>,
    rep: usize,
) -> Result<Vec<(Method, ReplicateOutcome)>> {
    let data = generate_replicate(spec, shared, rep)?;
    let y_dense = data.y.to_dense::<S>();
    let d = match spec.d {
        DimensionSpec::Fixed(d) => d,
        DimensionSpec::Auto => {
            let sv = singular_values(&y_dense)?;
            elbow_dimension(&sv, data.y.n() / 2)?
        }
    };
    let ase = adjacency_spectral_embedding(&y_dense, d)?;

    let mut outcomes = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let start = Instant::now();
        let embedding: DenseMatrix<S> = match method {
            Method::Ase => ase.values().clone(),
            Method::Pse => {
                let mut cfg = spec.chain.clone();
                cfg.target = ChainTarget::Pse;
                cfg.seed = substream(spec.seed, 0x5000_0000 + rep as u64);
                let init = project_to_latent_space(&ase);
                let summary =
                    run_chain(&data.y, d, &PriorSpec::UniformOnX, &cfg, Some(&init))?;
                point_estimator(&summary, d)?.into_values()
            }
            Method::Gse => {
                let mut cfg = spec.chain.clone();
                cfg.target = ChainTarget::Gse;
                cfg.seed = substream(spec.seed, 0x6000_0000 + rep as u64);
                let prior = PriorSpec::gaussian(spec.gaussian_sigma)?;
                let summary = run_chain(&data.y, d, &prior, &cfg, Some(&ase))?;
                point_estimator(&summary, d)?.into_values()
            }
        };

        let loss = match &data.truth_latent {
            Some(truth) if truth.ncols() == d => Some(
                procrustes(&embedding, truth)?.loss.to_f64().unwrap_or(f64::NAN),
            ),
            _ => None,
        };

        let (ri, misclustered, cluster_sizes) = match spec.kmeans_k {
            Some(k) if k >= 1 => {
                let assignment = kmeans(
                    &embedding,
                    k,
                    spec.kmeans_restarts,
                    substream(spec.seed, 0x7000_0000 + rep as u64),
                )?;
                let mut sizes = vec![0usize; k];
                for &label in assignment.labels() {
                    sizes[label - 1] += 1;
                }
                match &data.truth_labels {
                    Some(truth) => {
                        let ri = rand_index(assignment.labels(), truth)?;
                        let k_all =
                            truth.iter().chain(assignment.labels()).copied().max().unwrap_or(1);
                        let ham = if k_all <= MAX_EXACT_K {
                            Some(min_permutation_hamming(assignment.labels(), truth)?)
                        } else {
                            None
                        };
                        (Some(ri), ham, sizes)
                    }
                    None => (None, None, sizes),
                }
            }
            _ => (None, None, Vec::new()),
        };

        outcomes.push((
            method,
            ReplicateOutcome {
                replicate: rep,
                d_used: d,
                loss,
                rand_index: ri,
                misclustered,
                cluster_sizes,
                wall_secs: start.elapsed().as_secs_f64(),
            },
        ));
    }
    Ok(outcomes)
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Run every replicate of every requested method and aggregate.
pub fn run_experiment<S: Scalar>(spec: &ExperimentSpec<S>) -> Result<ExperimentResult<S>> {
    spec.validate()?;

    let shared = match &spec.setup {
        SetupKind::EdgeListFile(path) => {
            let y = read_edge_list(path)?;
            let truth_labels = match &spec.labels_path {
                Some(p) => {
                    let labels = read_labels(p)?;
                    if labels.len() != y.n() {
                        return Err(Error::ShapeMismatch(format!(
                            "{} labels for {} vertices",
                            labels.len(),
                            y.n()
                        )));
                    }
                    Some(labels)
                }
                None => None,
            };
            Some(ReplicateData { y, truth_latent: None, truth_labels })
        }
        _ => None,
    };

    let per_rep: Vec<Result<Vec<(Method, ReplicateOutcome)>>> = (0..spec.replicates)
        .into_par_iter()
        .map(|rep| run_replicate(spec, shared.as_ref(), rep))
        .collect();

    let mut grouped: BTreeMap<String, Vec<ReplicateOutcome>> = BTreeMap::new();
    for rep_result in per_rep {
        for (method, outcome) in rep_result? {
            grouped.entry(method.name().to_string()).or_default().push(outcome);
        }
    }

    let mut per_method = BTreeMap::new();
    for (method, mut outcomes) in grouped {
        outcomes.sort_by_key(|o| o.replicate);
        let losses: Vec<f64> = outcomes.iter().filter_map(|o| o.loss).collect();
        let rands: Vec<f64> = outcomes.iter().filter_map(|o| o.rand_index).collect();
        let hams: Vec<f64> =
            outcomes.iter().filter_map(|o| o.misclustered.map(|h| h as f64)).collect();
        let walls: Vec<f64> = outcomes.iter().map(|o| o.wall_secs).collect();
        let (loss_mean, loss_sd) = if losses.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_sd(&losses);
            (Some(m), Some(s))
        };
        let (rand_mean, rand_sd) = if rands.is_empty() {
            (None, None)
        } else {
            let (m, s) = mean_sd(&rands);
            (Some(m), Some(s))
        };
        let ham_mean = if hams.is_empty() { None } else { Some(mean_sd(&hams).0) };
        per_method.insert(
            method,
            MethodStats {
                loss_mean,
                loss_sd,
                rand_index_mean: rand_mean,
                rand_index_sd: rand_sd,
                misclustered_mean: ham_mean,
                wall_secs_mean: mean_sd(&walls).0,
                replicates: outcomes,
            },
        );
    }

    Ok(ExperimentResult { format_version: RESULT_FORMAT_VERSION, spec: spec.clone(), per_method })
}

/// Embedding scatter CSV: `vertex,coord_1..coord_d[,label]`.
pub fn export_embedding_scatter<S: Scalar, P: AsRef<Path>>(
    path: P,
    embedding: &DenseMatrix<S>,
    labels: Option<&[usize]>,
) -> Result<()> {
    if let Some(l) = labels {
        if l.len() != embedding.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {} rows",
                l.len(),
                embedding.nrows()
            )));
        }
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let d = embedding.ncols();
    let coord_header: Vec<String> = (1..=d).map(|j| format!("coord_{j}")).collect();
    match labels {
        Some(_) => writeln!(out, "vertex,{},label", coord_header.join(","))?,
        None => writeln!(out, "vertex,{}", coord_header.join(","))?,
    }
    for i in 0..embedding.nrows() {
        let coords: Vec<String> = embedding.row(i).iter().map(|v| v.to_string()).collect();
        match labels {
            Some(l) => writeln!(out, "{},{},{}", i, coords.join(","), l[i])?,
            None => writeln!(out, "{},{}", i, coords.join(","))?,
        }
    }
    Ok(())
}

/// Scree CSV: `index,value`, 1-based indices.
pub fn export_scree<S: Scalar, P: AsRef<Path>>(path: P, values: &[S]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "index,value")?;
    for (idx, v) in values.iter().enumerate() {
        writeln!(out, "{},{}", idx + 1, v)?;
    }
    Ok(())
}

/// Ground-truth overlay CSV for a synthetic setup: the block positions, or
/// the Hardy-Weinberg curve sampled at 200 parameter values (endpoints
/// included).
pub fn export_truth_overlay<S: Scalar, P: AsRef<Path>>(path: P, setup: &SetupKind) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    match setup {
        SetupKind::HardyWeinberg => {
            writeln!(out, "t,coord_1,coord_2,coord_3")?;
            let steps = 200usize;
            for k in 0..steps {
                let t = S::cst(k as f64 / (steps - 1) as f64);
                let point = hardy_weinberg_point(t)?;
                writeln!(out, "{},{},{},{}", t, point[0], point[1], point[2])?;
            }
            Ok(())
        }
        SetupKind::EdgeListFile(_) => {
            Err(Error::InvalidArgument("edge-list data has no ground truth overlay".into()))
        }
        sbm => {
            let positions =
                sbm.block_positions::<S>().expect("SBM setups carry block positions");
            writeln!(out, "block,coord_1,coord_2")?;
            for b in 0..positions.nrows() {
                let row = positions.row(b);
                writeln!(out, "{},{},{}", b + 1, row[0], row[1])?;
            }
            Ok(())
        }
    }
}
