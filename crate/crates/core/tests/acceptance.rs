//! Acceptance suite: one pass/fail line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines;
//! the slow full-scale Hardy-Weinberg chain is `#[ignore]`d and can be added
//! with `-- --ignored`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdpg::align::procrustes;
use rdpg::experiment::{run_experiment, DimensionSpec, ExperimentSpec, Method, SetupKind};
use rdpg::graphio::{read_edge_list, write_edge_list};
use rdpg::likelihood::{bernoulli_loglik, bernoulli_loglik_row_delta, PriorSpec};
use rdpg::linalg::{random_orthogonal, sym_eigen};
use rdpg::mcmc::{run_chain, ChainConfig, ChainTarget};
use rdpg::model::{
    project_to_latent_space, row_in_latent_space, sample_rdpg, sample_rdpg_hollow, sbm_to_latent,
    AdjacencyMatrix, LatentMatrix,
};
use rdpg::oracle::{grid_posterior_moments, GridSpec};
use rdpg::spectral::adjacency_spectral_embedding;
use rdpg::{kmeans, min_permutation_hamming, rand_index, DenseMatrix};

struct Check {
    criterion: &'static str,
    pass: bool,
    detail: String,
}

fn check(criterion: &'static str, pass: bool, detail: String) -> Check {
    Check { criterion, pass, detail }
}

fn report(checks: &[Check]) {
    for c in checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {}: {}", c.criterion, c.detail);
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    assert!(
        failed.is_empty(),
        "{} criterion check(s) failed: {}",
        failed.len(),
        failed.iter().map(|c| c.criterion).collect::<Vec<_>>().join("; ")
    );
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    value >= target * (1.0 - rel) && value <= target * (1.0 + rel)
}

fn pair_graph(edge: u8) -> AdjacencyMatrix {
    AdjacencyMatrix::from_entries(2, vec![0, edge, edge, 0], false).unwrap()
}

#[test]
fn criterion_01_sampler_matches_quadrature_oracle() {
    let mut checks = Vec::new();
    let start = Instant::now();
    for (edge, closed_form) in [(1u8, 4.0 / 9.0), (0u8, 5.0 / 27.0)] {
        let y = pair_graph(edge);
        // Independent oracle first: quadrature agrees with the closed form.
        let oracle =
            grid_posterior_moments::<f64>(&y, &PriorSpec::UniformOnX, &GridSpec::default_for(2))
                .unwrap();
        let quad = oracle.mean_edge_probs[(0, 1)];
        checks.push(check(
            "criterion 1",
            (quad - closed_form).abs() < 1e-3,
            format!("quadrature oracle {quad:.6} vs closed form {closed_form:.6} (y12={edge})"),
        ));

        let cfg = ChainConfig::<f64> {
            iterations: 50_000,
            burn_in: 5_000,
            thin: 10,
            step_size: 0.05,
            seed: 1900 + edge as u64,
            adapt: true,
            target: ChainTarget::Pse,
            retain_cap: None,
        };
        let summary = run_chain(&y, 1, &PriorSpec::UniformOnX, &cfg, None).unwrap();
        let estimate = summary.mean_p.values()[(0, 1)];
        checks.push(check(
            "criterion 1",
            (estimate - closed_form).abs() <= 0.02,
            format!("chain E[x1 x2 | y12={edge}] = {estimate:.4}, oracle {closed_form:.4}"),
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    checks.push(check(
        "criterion 1",
        elapsed < 5.0,
        format!("both 50k-iteration chains plus oracles in {elapsed:.2}s (< 5s)"),
    ));
    report(&checks);
}

#[test]
fn criterion_02_noiseless_spectral_recovery() {
    let spec = SetupKind::SbmTable1K3.sbm_spec::<f64>().unwrap();
    let (x0, _) = sbm_to_latent(&spec, 60, 2024).unwrap();
    let p0 = x0.values().gram();
    let ase = adjacency_spectral_embedding(&p0, 2).unwrap();
    let loss = procrustes(ase.values(), x0.values()).unwrap().loss;
    report(&[check(
        "criterion 2",
        loss <= 1e-10,
        format!("ASE on noiseless P0 (K=3, n=60): Procrustes loss {loss:.3e} <= 1e-10"),
    )]);
}

#[test]
fn criteria_03_04_table_replication_and_method_ordering() {
    let mut spec = ExperimentSpec::<f64>::for_setup(SetupKind::SbmTable1K3, 31_337);
    spec.replicates = 10;
    spec.d = DimensionSpec::Fixed(2);
    let result = run_experiment(&spec).unwrap();

    let pse = result.stats(Method::Pse).unwrap();
    let ase = result.stats(Method::Ase).unwrap();
    let gse = result.stats(Method::Gse).unwrap();
    let (pse_loss, ase_loss, gse_loss) =
        (pse.loss_mean.unwrap(), ase.loss_mean.unwrap(), gse.loss_mean.unwrap());
    let (pse_ri, ase_ri) = (pse.rand_index_mean.unwrap(), ase.rand_index_mean.unwrap());

    let mut checks = vec![
        check(
            "criterion 3",
            within(pse_loss, 1.281e-2, 0.5),
            format!("mean PSE loss {pse_loss:.4e} within ±50% of 1.281e-2"),
        ),
        check(
            "criterion 3",
            within(ase_loss, 1.560e-2, 0.5),
            format!("mean ASE loss {ase_loss:.4e} within ±50% of 1.560e-2"),
        ),
        check(
            "criterion 3",
            within(gse_loss, 2.792e-2, 0.5),
            format!("mean GSE loss {gse_loss:.4e} within ±50% of 2.792e-2"),
        ),
    ];
    checks.push(check(
        "criterion 4",
        pse_loss <= ase_loss,
        format!("mean PSE loss {pse_loss:.4e} <= mean ASE loss {ase_loss:.4e}"),
    ));
    checks.push(check(
        "criterion 4",
        pse_ri >= ase_ri - 0.01,
        format!("mean PSE Rand index {pse_ri:.4} >= ASE {ase_ri:.4} - 0.01"),
    ));
    checks.push(check(
        "criterion 4",
        pse_ri >= 0.85,
        format!("mean PSE Rand index {pse_ri:.4} >= 0.85"),
    ));
    report(&checks);
}

#[test]
fn criteria_05_06_contraction_and_bounded_misclustering() {
    let sizes = [150usize, 300, 600];
    let mut losses = Vec::new();
    let mut misclustered = Vec::new();
    for &n in &sizes {
        let mut spec = ExperimentSpec::<f64>::for_setup(SetupKind::SbmTable1K3, 500 + n as u64);
        spec.n = n;
        spec.replicates = 10;
        spec.methods = vec![Method::Pse];
        let result = run_experiment(&spec).unwrap();
        let stats = result.stats(Method::Pse).unwrap();
        losses.push(stats.loss_mean.unwrap());
        misclustered.push(stats.misclustered_mean.unwrap());
    }

    let ratio = losses[0] / losses[2];
    let mut checks = vec![
        check(
            "criterion 5",
            losses[0] > losses[1] && losses[1] > losses[2],
            format!(
                "mean PSE loss decreasing in n: {:.4e} (150) > {:.4e} (300) > {:.4e} (600)",
                losses[0], losses[1], losses[2]
            ),
        ),
        check(
            "criterion 5",
            (2.0..=8.0).contains(&ratio),
            format!("loss(150)/loss(600) = {ratio:.2} in [2, 8]"),
        ),
    ];
    checks.push(check(
        "criterion 6",
        misclustered[2] <= misclustered[1] + 2.0,
        format!(
            "mean mis-clustered at n=600 ({:.2}) <= n=300 ({:.2}) + 2",
            misclustered[2], misclustered[1]
        ),
    ));
    report(&checks);
}

#[test]
fn criterion_07_hardy_weinberg_desk_scale() {
    let mut checks = Vec::new();

    // Full-scale ASE (cheap: one eigendecomposition).
    let mut ase_spec = ExperimentSpec::<f64>::for_setup(SetupKind::HardyWeinberg, 9_000);
    ase_spec.methods = vec![Method::Ase];
    let ase_result = run_experiment(&ase_spec).unwrap();
    let ase_loss = ase_result.stats(Method::Ase).unwrap().loss_mean.unwrap();
    checks.push(check(
        "criterion 7",
        within(ase_loss, 1.603e-2, 0.5),
        format!("full-scale ASE loss {ase_loss:.4e} within ±50% of 1.603e-2 (n=2000)"),
    ));

    // Desk-scale ordering: PSE no worse than ASE on the same draw.
    let mut desk = ExperimentSpec::<f64>::for_setup(SetupKind::HardyWeinberg, 9_100);
    desk.n = 500;
    desk.methods = vec![Method::Ase, Method::Pse];
    let result = run_experiment(&desk).unwrap();
    let desk_ase = result.stats(Method::Ase).unwrap().loss_mean.unwrap();
    let desk_pse = result.stats(Method::Pse).unwrap().loss_mean.unwrap();
    checks.push(check(
        "criterion 7",
        desk_pse <= desk_ase,
        format!("desk-scale (n=500) PSE loss {desk_pse:.4e} <= ASE loss {desk_ase:.4e}"),
    ));
    report(&checks);
}

/// Full-scale Hardy-Weinberg PSE (n=2000, paper chain config) — slow; run
/// explicitly with `cargo test --test acceptance -- --ignored`.
#[test]
#[ignore = "full-scale chain takes on the order of ten minutes"]
fn criterion_07_hardy_weinberg_full_scale_pse() {
    let mut spec = ExperimentSpec::<f64>::for_setup(SetupKind::HardyWeinberg, 9_200);
    spec.methods = vec![Method::Pse];
    spec.chain.retain_cap = Some(8);
    let result = run_experiment(&spec).unwrap();
    let pse_loss = result.stats(Method::Pse).unwrap().loss_mean.unwrap();
    report(&[check(
        "criterion 7 (full-scale PSE)",
        within(pse_loss, 9.148e-3, 0.5),
        format!("full-scale PSE loss {pse_loss:.4e} within ±50% of 9.148e-3"),
    )]);
}

#[test]
fn criterion_08_combinatorial_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst = String::new();
    let mut all_match = true;
    for _ in 0..200 {
        let n = rng.gen_range(2..=8usize);
        let k = rng.gen_range(1..=4usize);
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=k)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=k)).collect();

        // Exhaustive pair enumeration for the Rand index.
        let mut agree = 0u64;
        let mut total = 0u64;
        for i in 0..n {
            for j in (i + 1)..n {
                total += 1;
                if (a[i] == a[j]) == (b[i] == b[j]) {
                    agree += 1;
                }
            }
        }
        let brute_ri = agree as f64 / total as f64;
        let ri = rand_index(&a, &b).unwrap();

        // Exhaustive permutation search for the Hamming distance.
        let k_all = a.iter().chain(&b).copied().max().unwrap();
        let mut best = usize::MAX;
        let mut perm: Vec<usize> = (1..=k_all).collect();
        heap_permutations(&mut perm, 0, &mut |p| {
            let mismatches = a.iter().zip(&b).filter(|(&la, &lb)| p[la - 1] != lb).count();
            best = best.min(mismatches);
        });
        let ham = min_permutation_hamming(&a, &b).unwrap();

        if ri != brute_ri || ham != best {
            all_match = false;
            worst = format!("a={a:?} b={b:?}: ri {ri} vs {brute_ri}, hamming {ham} vs {best}");
            break;
        }
    }
    report(&[check(
        "criterion 8",
        all_match,
        if all_match {
            "rand_index and min_permutation_hamming match exhaustive enumeration on \
             200 random pairs"
                .to_string()
        } else {
            worst
        },
    )]);
}

fn heap_permutations(items: &mut [usize], start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        heap_permutations(items, start + 1, visit);
        items.swap(start, i);
    }
}

#[test]
fn criterion_09_procrustes_beats_random_rotations() {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let mut worst_margin = f64::INFINITY;
    for trial in 0..50 {
        let d = 1 + trial % 3;
        let n = 10;
        let mut x_hat: DenseMatrix<f64> = DenseMatrix::zeros(n, d);
        let mut x0: DenseMatrix<f64> = DenseMatrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                x_hat[(i, j)] = rng.gen_range(-1.0..1.0);
                x0[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let best = (procrustes(&x_hat, &x0).unwrap().loss * n as f64).sqrt();
        for _ in 0..1000 {
            let r = random_orthogonal::<f64, _>(d, &mut rng);
            let competitor = x_hat.sub(&x0.matmul(&r).unwrap()).unwrap().frobenius_norm();
            worst_margin = worst_margin.min(competitor - best);
        }
    }
    report(&[check(
        "criterion 9",
        worst_margin >= -1e-9,
        format!("closed-form rotation beat 50x1000 random rotations (worst margin {worst_margin:.2e})"),
    )]);
}

#[test]
fn criterion_10_property_suites() {
    let mut checks = Vec::new();

    // (a) PSE samples stay in the latent space; (b) mean_P is a valid
    // edge-probability matrix.
    let sbm = SetupKind::SbmTable1K3.sbm_spec::<f64>().unwrap();
    let (latent, _) = sbm_to_latent(&sbm, 30, 1).unwrap();
    let y = sample_rdpg(&latent, 2).unwrap();
    let cfg = ChainConfig::<f64> {
        iterations: 3_000,
        burn_in: 1_000,
        thin: 10,
        step_size: 0.05,
        seed: 77,
        adapt: true,
        target: ChainTarget::Pse,
        retain_cap: None,
    };
    let summary = run_chain(&y, 2, &PriorSpec::UniformOnX, &cfg, None).unwrap();
    let in_space = summary
        .retained
        .iter()
        .all(|s| (0..s.n()).all(|i| row_in_latent_space(s.row(i))));
    checks.push(check(
        "criterion 10",
        in_space,
        format!("all {} retained PSE samples lie in the latent space exactly", summary.retained.len()),
    ));

    let sym = summary.mean_p.values().max_asymmetry();
    let range_ok = summary.mean_p.validate_unit_range(1e-10).is_ok();
    let min_eig = *sym_eigen(summary.mean_p.values()).unwrap().values.last().unwrap();
    checks.push(check(
        "criterion 10",
        sym <= 1e-12 && range_ok && min_eig >= -1e-8,
        format!("mean_P symmetric (asym {sym:.1e}), entries in [0,1]±1e-10, PSD (λ_min {min_eig:.1e})"),
    ));

    // (c) Row-delta vs full-likelihood agreement on 500 random instances.
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut max_err = 0.0f64;
    for trial in 0..500u64 {
        let n = 5 + (trial % 3) as usize;
        let d = 1 + (trial % 2) as usize;
        let mut values: DenseMatrix<f64> = DenseMatrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                values[(i, j)] = rng.gen_range(0.05..0.7);
            }
        }
        let x = project_to_latent_space(&LatentMatrix::unconstrained(values).unwrap());
        let graph = if trial % 2 == 0 {
            sample_rdpg(&x, trial).unwrap()
        } else {
            sample_rdpg_hollow(&x, trial).unwrap()
        };
        let i = rng.gen_range(0..n);
        let mut x_new = vec![0.0; d];
        for v in &mut x_new {
            *v = rng.gen_range(0.01..0.7);
        }
        let full_old = bernoulli_loglik(&x, &graph).unwrap();
        let mut replaced = x.values().clone();
        replaced.row_mut(i).copy_from_slice(&x_new);
        let full_new =
            bernoulli_loglik(&LatentMatrix::constrained(replaced).unwrap(), &graph).unwrap();
        let delta = bernoulli_loglik_row_delta(&x, &graph, i, &x_new).unwrap();
        if full_new.is_finite() {
            max_err = max_err.max((delta - (full_new - full_old)).abs() / (1.0 + full_old.abs()));
        }
    }
    checks.push(check(
        "criterion 10",
        max_err <= 1e-9,
        format!("row-delta vs full recomputation: max relative error {max_err:.2e} <= 1e-9"),
    ));

    // (d) Byte-for-byte determinism under fixed seeds.
    let s1 = run_chain(&y, 2, &PriorSpec::UniformOnX, &cfg, None).unwrap();
    let bits = |s: &rdpg::PosteriorSummary<f64>| -> Vec<u64> {
        s.mean_p
            .values()
            .data()
            .iter()
            .chain(s.retained.iter().flat_map(|r| r.values().data()))
            .map(|v| v.to_bits())
            .collect()
    };
    let deterministic = bits(&summary) == bits(&s1)
        && summary.acceptance_rate == s1.acceptance_rate
        && summary.per_vertex_acceptance == s1.per_vertex_acceptance;
    checks.push(check(
        "criterion 10",
        deterministic,
        "rerunning the chain with the same seed reproduces samples and mean_P bitwise".into(),
    ));

    let mut tiny = ExperimentSpec::<f64>::for_setup(SetupKind::SbmTable1K3, 5);
    tiny.n = 36;
    tiny.replicates = 2;
    tiny.chain.iterations = 400;
    tiny.chain.burn_in = 100;
    let fp1 = run_experiment(&tiny).unwrap().fingerprint().unwrap();
    let fp2 = run_experiment(&tiny).unwrap().fingerprint().unwrap();
    checks.push(check(
        "criterion 10",
        fp1 == fp2,
        "experiment reruns with a fixed seed have identical result fingerprints".into(),
    ));

    // (e) Edge-list pipeline: ingest → embed → cluster shape checks (the
    // real-data path has no ground truth, so only internal diagnostics).
    let hollow = sample_rdpg_hollow(&latent, 3).unwrap();
    let dir = std::env::temp_dir().join(format!("rdpg-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let edges = dir.join("edges.txt");
    write_edge_list(&edges, &hollow).unwrap();
    let loaded = read_edge_list(&edges).unwrap();
    let roundtrip = loaded == hollow;
    let embed = adjacency_spectral_embedding(&loaded.to_dense::<f64>(), 2).unwrap();
    let clusters = kmeans(embed.values(), 3, 5, 9).unwrap();
    let shapes_ok = embed.n() == 30
        && embed.d() == 2
        && clusters.labels().len() == 30
        && clusters.labels().iter().all(|&l| (1..=3).contains(&l));
    std::fs::remove_dir_all(&dir).ok();
    checks.push(check(
        "criterion 10",
        roundtrip && shapes_ok,
        "edge-list round trip is lossless and the ingest→embed→cluster pipeline \
         produces consistent shapes"
            .into(),
    ));

    report(&checks);
}
