//! End-to-end checks of the `rdpg` binary: the generate → scree → embed →
//! cluster pipeline on a small synthetic graph, plus exit-code behavior.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rdpg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdpg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rdpg-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn pipeline_generate_scree_embed_cluster() {
    let dir = tmpdir("pipeline");
    let gen_dir = dir.join("gen");
    let out = rdpg(&[
        "generate",
        "--setup",
        "sbm_table1_k3",
        "--n",
        "40",
        "--seed",
        "5",
        "--out",
        gen_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let edges = gen_dir.join("edges.txt");
    let labels = gen_dir.join("labels.txt");
    assert!(edges.exists() && labels.exists() && gen_dir.join("latent.csv").exists());
    assert_eq!(lines(&gen_dir.join("truth_overlay.csv")), 4);
    assert_eq!(lines(&labels), 40);

    let scree_csv = dir.join("scree.csv");
    let out = rdpg(&[
        "scree",
        "--edge-list",
        edges.to_str().unwrap(),
        "--out",
        scree_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(lines(&scree_csv), 41, "header plus one value per vertex");

    let embed_dir = dir.join("embed");
    let out = rdpg(&[
        "embed",
        "--edge-list",
        edges.to_str().unwrap(),
        "--method",
        "ase",
        "--d",
        "2",
        "--out",
        embed_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(lines(&embed_dir.join("embedding_ase.csv")), 41);

    let out = rdpg(&[
        "cluster",
        "--edge-list",
        edges.to_str().unwrap(),
        "--method",
        "ase",
        "--d",
        "2",
        "--k",
        "3",
        "--labels",
        labels.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("rand index"), "got: {stdout}");

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tiny_chain_through_the_cli() {
    let dir = tmpdir("chain");
    // n is small enough that the full-length default chain is instant.
    let out = rdpg(&[
        "cluster",
        "--setup",
        "sbm_table1_k3",
        "--n",
        "24",
        "--seed",
        "11",
        "--method",
        "pse",
        "--d",
        "2",
        "--k",
        "3",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(lines(&dir.join("cluster_labels.txt")), 24);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn benchmark_writes_result_files() {
    let dir = tmpdir("bench");
    let out = rdpg(&[
        "benchmark",
        "--setup",
        "sbm_table1_k3",
        "--n",
        "36",
        "--seed",
        "2",
        "--method",
        "ase",
        "--d",
        "2",
        "--replicates",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("result.json").exists());
    let csv = std::fs::read_to_string(dir.join("result.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3, "header plus two replicates");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn spec_validation_failures_exit_with_code_two() {
    let out = rdpg(&["evaluate", "--setup", "bogus_setup"]);
    assert_eq!(out.status.code(), Some(2), "unknown setup");

    let out = rdpg(&["evaluate", "--setup", "sbm_table1_k3", "--replicates", "0"]);
    assert_eq!(out.status.code(), Some(2), "zero replicates");

    let out = rdpg(&["generate", "--setup", "edge_list_file", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(2), "generate needs a synthetic setup");

    let dir = tmpdir("exit2");
    let edges = dir.join("edges.txt");
    std::fs::write(&edges, "0 1\n1 2\n").unwrap();
    // Real data has no latent-position ground truth; asking for truth
    // metrics (via --labels with a bad file is I/O, so use evaluate with
    // labels absent but required) must be a validation failure.
    let out = rdpg(&[
        "evaluate",
        "--setup",
        "edge_list_file",
        "--edge-list",
        edges.to_str().unwrap(),
        "--method",
        "ase",
        "--labels",
        dir.join("missing.txt").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn evaluate_runs_on_real_data_without_truth() {
    let dir = tmpdir("realdata");
    let edges = dir.join("edges.txt");
    std::fs::write(&edges, "0 1\n1 2\n2 3\n3 0\n0 2\n").unwrap();
    let out = rdpg(&[
        "evaluate",
        "--setup",
        "edge_list_file",
        "--edge-list",
        edges.to_str().unwrap(),
        "--method",
        "ase",
        "--d",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("ase"), "diagnostics table printed: {stdout}");
    std::fs::remove_dir_all(&dir).ok();
}
