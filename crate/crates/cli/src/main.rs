//! `rdpg` — generate, embed, cluster, and benchmark random dot product
//! graphs from the command line.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rdpg::experiment::{
    export_embedding_scatter, export_scree, export_truth_overlay, run_experiment, DimensionSpec,
    ExperimentSpec, Method, SetupKind,
};
use rdpg::graphio::{read_edge_list, read_labels, write_edge_list};
use rdpg::likelihood::PriorSpec;
use rdpg::mcmc::{point_estimator, run_chain, ChainTarget};
use rdpg::model::{
    hardy_weinberg_latent, project_to_latent_space, sample_rdpg, sample_rdpg_hollow,
    sbm_to_latent, AdjacencyMatrix,
};
use rdpg::spectral::{adjacency_spectral_embedding, elbow_dimension, singular_values};
use rdpg::{kmeans, min_permutation_hamming, rand_index, DenseMatrix};

#[derive(Parser)]
#[command(name = "rdpg", version, about = "Latent-position estimation for random dot product graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic graph and write its edge list plus ground truth.
    Generate(GenerateArgs),
    /// Write the singular values of a graph as a scree CSV.
    Scree(ScreeArgs),
    /// Embed a graph with one method and write the coordinates.
    Embed(EmbedArgs),
    /// Embed and K-means cluster a graph; report partition diagnostics.
    Cluster(ClusterArgs),
    /// One detailed run per method: losses and clustering metrics.
    Evaluate(EvaluateArgs),
    /// Replicated benchmark with aggregate statistics and result files.
    Benchmark(BenchmarkArgs),
}

/// Where the graph comes from: a built-in synthetic setup or an edge list.
#[derive(Args, Clone)]
struct DataArgs {
    /// Built-in setup: sbm_table1_k3 | sbm_table1_k5 | sbm_table1_k7 |
    /// hardy_weinberg | edge_list_file.
    #[arg(long)]
    setup: Option<String>,
    /// Edge-list file ("u v" per line); implies --setup edge_list_file.
    #[arg(long)]
    edge_list: Option<PathBuf>,
    /// Vertex count override for synthetic setups.
    #[arg(long)]
    n: Option<usize>,
    /// Base RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample synthetic graphs without self-loops (likelihoods then range
    /// over i < j).
    #[arg(long)]
    no_self_loops: bool,
    /// Desk-scale factor: multiplies n and the chain length.
    #[arg(long)]
    scale: Option<f64>,
}

impl DataArgs {
    fn setup_kind(&self) -> Result<SetupKind> {
        match (&self.setup, &self.edge_list) {
            (None, Some(path)) => Ok(SetupKind::EdgeListFile(path.clone())),
            (None, None) => bail!(rdpg::Error::InvalidArgument(
                "need --setup or --edge-list".into()
            )),
            (Some(name), edge) => Ok(SetupKind::parse(name, edge.clone())?),
        }
    }

    fn spec(&self) -> Result<ExperimentSpec<f64>> {
        let mut spec = ExperimentSpec::for_setup(self.setup_kind()?, self.seed);
        if let Some(n) = self.n {
            spec.n = n;
        }
        spec.self_loops = !self.no_self_loops;
        if let Some(scale) = self.scale {
            spec.apply_scale(scale)?;
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScreeArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Embedding method: ase | pse | gse.
    #[arg(long)]
    method: String,
    /// Embedding dimension, or "auto" for the scree elbow.
    #[arg(long, default_value = "auto")]
    d: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "ase")]
    method: String,
    #[arg(long, default_value = "auto")]
    d: String,
    /// Number of clusters.
    #[arg(long)]
    k: usize,
    /// Ground-truth labels (one 1-based label per line) for the Rand index.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Methods to run (repeatable); defaults to all three.
    #[arg(long = "method")]
    methods: Vec<String>,
    #[arg(long, default_value = "auto")]
    d: String,
    #[arg(long, default_value_t = 1)]
    replicates: usize,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long = "method")]
    methods: Vec<String>,
    #[arg(long, default_value = "auto")]
    d: String,
    /// Replicates to aggregate over (mean and standard deviation).
    #[arg(long, default_value_t = 10)]
    replicates: usize,
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Output directory for result.json and result.csv.
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

/// 2 for spec/argument validation problems, 1 for everything else.
fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<rdpg::Error>() {
        Some(
            rdpg::Error::InvalidArgument(_)
            | rdpg::Error::InvalidChainConfig(_)
            | rdpg::Error::ShapeMismatch(_)
            | rdpg::Error::ExactSearchBound(_, _)
            | rdpg::Error::GridCapExceeded(_, _),
        ) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => generate(args),
        Command::Scree(args) => scree(args),
        Command::Embed(args) => embed(args),
        Command::Cluster(args) => cluster(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Benchmark(args) => benchmark(args),
    }
}

fn parse_dimension(text: &str) -> Result<DimensionSpec> {
    if text == "auto" {
        return Ok(DimensionSpec::Auto);
    }
    let d: usize = text.parse().map_err(|_| {
        rdpg::Error::InvalidArgument(format!("--d must be a positive integer or 'auto', got {text}"))
    })?;
    if d == 0 {
        bail!(rdpg::Error::InvalidArgument("--d must be >= 1".into()));
    }
    Ok(DimensionSpec::Fixed(d))
}

fn parse_methods(raw: &[String]) -> Result<Vec<Method>> {
    if raw.is_empty() {
        return Ok(vec![Method::Ase, Method::Pse, Method::Gse]);
    }
    raw.iter().map(|name| Ok(Method::parse(name)?)).collect()
}

/// Materialize the graph for the one-shot subcommands.
fn load_graph(spec: &ExperimentSpec<f64>) -> Result<(AdjacencyMatrix, Option<Vec<usize>>)> {
    let gen_seed = rdpg::seeding::substream(spec.seed, 0);
    let graph_seed = rdpg::seeding::substream(spec.seed, 1);
    match &spec.setup {
        SetupKind::EdgeListFile(path) => {
            let y = read_edge_list(path).with_context(|| format!("reading {}", path.display()))?;
            Ok((y, None))
        }
        SetupKind::HardyWeinberg => {
            let (latent, _) = hardy_weinberg_latent::<f64>(spec.n, gen_seed)?;
            let y = if spec.self_loops {
                sample_rdpg(&latent, graph_seed)?
            } else {
                sample_rdpg_hollow(&latent, graph_seed)?
            };
            Ok((y, None))
        }
        sbm => {
            let sbm_spec = sbm.sbm_spec::<f64>().expect("synthetic SBM setup");
            let (latent, truth) = sbm_to_latent(&sbm_spec, spec.n, gen_seed)?;
            let y = if spec.self_loops {
                sample_rdpg(&latent, graph_seed)?
            } else {
                sample_rdpg_hollow(&latent, graph_seed)?
            };
            Ok((y, Some(truth.labels().to_vec())))
        }
    }
}

fn resolve_dimension(y: &AdjacencyMatrix, d: DimensionSpec) -> Result<(usize, Vec<f64>)> {
    let sv = singular_values(&y.to_dense::<f64>())?;
    let d = match d {
        DimensionSpec::Fixed(d) => d,
        DimensionSpec::Auto => elbow_dimension(&sv, y.n() / 2)?,
    };
    Ok((d, sv))
}

fn embed_graph(
    y: &AdjacencyMatrix,
    method: Method,
    d: usize,
    spec: &ExperimentSpec<f64>,
) -> Result<DenseMatrix<f64>> {
    let ase = adjacency_spectral_embedding(&y.to_dense::<f64>(), d)?;
    let embedding = match method {
        Method::Ase => ase.into_values(),
        Method::Pse => {
            let mut cfg = spec.chain.clone();
            cfg.target = ChainTarget::Pse;
            cfg.seed = rdpg::seeding::substream(spec.seed, 0x5000_0000);
            let init = project_to_latent_space(&ase);
            let summary = run_chain(y, d, &PriorSpec::UniformOnX, &cfg, Some(&init))?;
            eprintln!("pse chain acceptance rate: {:.3}", summary.acceptance_rate);
            point_estimator(&summary, d)?.into_values()
        }
        Method::Gse => {
            let mut cfg = spec.chain.clone();
            cfg.target = ChainTarget::Gse;
            cfg.seed = rdpg::seeding::substream(spec.seed, 0x6000_0000);
            let prior = PriorSpec::gaussian(spec.gaussian_sigma)?;
            let summary = run_chain(y, d, &prior, &cfg, Some(&ase))?;
            eprintln!("gse chain acceptance rate: {:.3}", summary.acceptance_rate);
            point_estimator(&summary, d)?.into_values()
        }
    };
    Ok(embedding)
}

fn generate(args: GenerateArgs) -> Result<()> {
    let spec = args.data.spec()?;
    if matches!(spec.setup, SetupKind::EdgeListFile(_)) {
        bail!(rdpg::Error::InvalidArgument("generate needs a synthetic setup".into()));
    }
    std::fs::create_dir_all(&args.out)?;
    let gen_seed = rdpg::seeding::substream(spec.seed, 0);
    let graph_seed = rdpg::seeding::substream(spec.seed, 1);

    let (latent, labels) = match &spec.setup {
        SetupKind::HardyWeinberg => {
            let (latent, _) = hardy_weinberg_latent::<f64>(spec.n, gen_seed)?;
            (latent, None)
        }
        sbm => {
            let sbm_spec = sbm.sbm_spec::<f64>().expect("synthetic SBM setup");
            let (latent, truth) = sbm_to_latent(&sbm_spec, spec.n, gen_seed)?;
            (latent, Some(truth.labels().to_vec()))
        }
    };
    let y = if spec.self_loops {
        sample_rdpg(&latent, graph_seed)?
    } else {
        sample_rdpg_hollow(&latent, graph_seed)?
    };

    write_edge_list(args.out.join("edges.txt"), &y)?;
    export_embedding_scatter(args.out.join("latent.csv"), latent.values(), labels.as_deref())?;
    export_truth_overlay::<f64, _>(args.out.join("truth_overlay.csv"), &spec.setup)?;
    if let Some(labels) = &labels {
        let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
        std::fs::write(args.out.join("labels.txt"), text)?;
    }
    println!(
        "generated {} vertices, {} edges (setup {}, seed {}) into {}",
        y.n(),
        y.edge_count(),
        spec.setup.name(),
        spec.seed,
        args.out.display()
    );
    Ok(())
}

fn scree(args: ScreeArgs) -> Result<()> {
    let spec = args.data.spec()?;
    let (y, _) = load_graph(&spec)?;
    let sv = singular_values(&y.to_dense::<f64>())?;
    match &args.out {
        Some(path) => {
            export_scree(path, &sv)?;
            println!("wrote {} singular values to {}", sv.len(), path.display());
        }
        None => {
            println!("index,value");
            for (i, v) in sv.iter().enumerate() {
                println!("{},{}", i + 1, v);
            }
        }
    }
    Ok(())
}

fn embed(args: EmbedArgs) -> Result<()> {
    let spec = args.data.spec()?;
    let method = Method::parse(&args.method)?;
    let (y, truth_labels) = load_graph(&spec)?;
    let (d, sv) = resolve_dimension(&y, parse_dimension(&args.d)?)?;
    let embedding = embed_graph(&y, method, d, &spec)?;

    std::fs::create_dir_all(&args.out)?;
    export_embedding_scatter(
        args.out.join(format!("embedding_{}.csv", method.name())),
        &embedding,
        truth_labels.as_deref(),
    )?;
    export_scree(args.out.join("scree.csv"), &sv)?;
    if !matches!(spec.setup, SetupKind::EdgeListFile(_)) {
        export_truth_overlay::<f64, _>(args.out.join("truth_overlay.csv"), &spec.setup)?;
    }
    println!(
        "embedded {} vertices with {} at d={} into {}",
        y.n(),
        method.name(),
        d,
        args.out.display()
    );
    Ok(())
}

fn cluster(args: ClusterArgs) -> Result<()> {
    let spec = args.data.spec()?;
    let method = Method::parse(&args.method)?;
    let (y, synthetic_truth) = load_graph(&spec)?;
    let (d, _) = resolve_dimension(&y, parse_dimension(&args.d)?)?;
    let embedding = embed_graph(&y, method, d, &spec)?;

    let assignment = kmeans(
        &embedding,
        args.k,
        spec.kmeans_restarts,
        rdpg::seeding::substream(spec.seed, 0x7000_0000),
    )?;
    let mut sizes = vec![0usize; args.k];
    for &label in assignment.labels() {
        sizes[label - 1] += 1;
    }
    println!("method {}, d={}, K={}, cluster sizes {:?}", method.name(), d, args.k, sizes);

    let reference = match &args.labels {
        Some(path) => Some(read_labels(path)?),
        None => synthetic_truth,
    };
    if let Some(truth) = reference {
        if truth.len() != y.n() {
            bail!(rdpg::Error::ShapeMismatch(format!(
                "{} labels for {} vertices",
                truth.len(),
                y.n()
            )));
        }
        let ri = rand_index(assignment.labels(), &truth)?;
        print!("rand index vs labels: {ri:.4}");
        let k_all = truth.iter().chain(assignment.labels()).copied().max().unwrap_or(1);
        if k_all <= rdpg::cluster::MAX_EXACT_K {
            let ham = min_permutation_hamming(assignment.labels(), &truth)?;
            println!(", mis-clustered: {ham}");
        } else {
            println!();
        }
    }

    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        export_embedding_scatter(
            out.join(format!("embedding_{}.csv", method.name())),
            &embedding,
            Some(assignment.labels()),
        )?;
        let text: String = assignment.labels().iter().map(|l| format!("{l}\n")).collect();
        std::fs::write(out.join("cluster_labels.txt"), text)?;
    }
    Ok(())
}

fn run_spec(
    data: &DataArgs,
    methods: &[String],
    d: &str,
    replicates: usize,
    labels: Option<PathBuf>,
    require_truth: bool,
) -> Result<rdpg::ExperimentResult<f64>> {
    let mut spec = data.spec()?;
    spec.methods = parse_methods(methods)?;
    spec.d = parse_dimension(d)?;
    spec.replicates = replicates;
    spec.labels_path = labels;
    if matches!(spec.setup, SetupKind::EdgeListFile(_)) {
        spec.require_truth_metrics = require_truth;
        if spec.labels_path.is_none() {
            spec.kmeans_k = None;
        }
    }
    Ok(run_experiment(&spec)?)
}

fn print_table(result: &rdpg::ExperimentResult<f64>) {
    println!(
        "{:<6} {:>12} {:>12} {:>12} {:>12} {:>14} {:>10}",
        "method", "loss_mean", "loss_sd", "rand_mean", "rand_sd", "misclustered", "secs"
    );
    for (method, stats) in &result.per_method {
        let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4e}"));
        println!(
            "{:<6} {:>12} {:>12} {:>12} {:>12} {:>14} {:>10.2}",
            method,
            fmt(stats.loss_mean),
            fmt(stats.loss_sd),
            fmt(stats.rand_index_mean),
            fmt(stats.rand_index_sd),
            fmt(stats.misclustered_mean),
            stats.wall_secs_mean,
        );
    }
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let require_truth = args.labels.is_some();
    let result =
        run_spec(&args.data, &args.methods, &args.d, args.replicates, args.labels, require_truth)?;
    print_table(&result);
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        result.write_json(out.join("result.json"))?;
        result.write_csv(out.join("result.csv"))?;
    }
    Ok(())
}

fn benchmark(args: BenchmarkArgs) -> Result<()> {
    let result = run_spec(
        &args.data,
        &args.methods,
        &args.d,
        args.replicates,
        args.labels.clone(),
        args.labels.is_some(),
    )?;
    print_table(&result);
    std::fs::create_dir_all(&args.out)?;
    result.write_json(args.out.join("result.json"))?;
    result.write_csv(args.out.join("result.csv"))?;
    println!("results written to {}", args.out.display());
    Ok(())
}
