//! End-to-end runs of the `dcsbm` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dcsbm::analysis::adjusted_rand_index;
use dcsbm::io::read_partition;

fn dcsbm(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcsbm"))
        .args(args)
        .current_dir(cwd)
        .env_remove("DCSBM_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn planted_params() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/planted.sim")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, body).unwrap();
    p
}

const SHORT: &str = "chains = 2\niterations = 1500\nburn_in = 500\nthin = 5\nseed = 4\n";

/// Simulates the planted network into `dir/sim` and returns its config.
fn simulated_run(dir: &Path) -> PathBuf {
    let out = dcsbm(&["simulate", planted_params().to_str().unwrap(), "-o", "sim"], dir);
    assert!(out.status.success(), "{}", stderr(&out));
    write_config(dir, &format!("model = static\ndata = sim/network.txt\n{SHORT}"))
}

#[test]
fn simulate_then_fit_recovers_planted_blocks() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated_run(tmp.path());
    let out = dcsbm(&["fit", cfg.to_str().unwrap(), "-o", "fit"], tmp.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let run = tmp.path().join("fit");
    for f in [
        "run.meta",
        "chain_1.csv",
        "chain_2.csv",
        "config.txt",
        "K_hist.csv",
        "K_hist.svg",
        "L_hist.csv",
        "L_hist.svg",
        "alpha_hist.csv",
        "nu_hist.csv",
        "psm_community.csv",
        "psm_community.svg",
        "psm_popularity.csv",
        "psm_popularity.svg",
        "binder_community.csv",
        "binder_popularity.csv",
        "theta_means.csv",
        "summary.txt",
    ] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    assert!(!run.join("eta_hist.csv").exists());
    let truth = read_partition(&tmp.path().join("sim/truth_community.csv")).unwrap();
    let found = read_partition(&run.join("binder_community.csv")).unwrap();
    let ari = adjusted_rand_index(&truth, &found).unwrap();
    assert!(ari >= 0.9, "ARI {ari}");

    let chain = fs::read_to_string(run.join("chain_1.csv")).unwrap();
    assert!(chain.starts_with("draw,sweep,K,L,alpha,nu,eta,z_1,"));
    assert_eq!(chain.lines().count(), 1 + 200);

    let summary = fs::read_to_string(run.join("summary.txt")).unwrap();
    assert!(summary.contains("model: static") && summary.contains("binder communities"));
}

#[test]
fn svg_outputs_are_well_formed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated_run(tmp.path());
    assert!(dcsbm(&["fit", cfg.to_str().unwrap(), "-o", "fit"], tmp.path()).status.success());
    for f in ["K_hist.svg", "L_hist.svg", "psm_community.svg", "psm_popularity.svg"] {
        let text = fs::read_to_string(tmp.path().join("fit").join(f)).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{f}: {e}"));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
    let heat = fs::read_to_string(tmp.path().join("fit/psm_community.svg")).unwrap();
    let doc = roxmltree::Document::parse(&heat).unwrap();
    let cells = doc.descendants().filter(|n| n.has_tag_name("rect") && n.attribute("fill") != Some("none")).count();
    assert_eq!(cells, 40 * 40);
}

#[test]
fn same_seed_reproduces_chains_and_summaries() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated_run(tmp.path());
    assert!(dcsbm(&["fit", cfg.to_str().unwrap(), "-o", "a", "--jobs", "1"], tmp.path()).status.success());
    assert!(dcsbm(&["fit", cfg.to_str().unwrap(), "-o", "b"], tmp.path()).status.success());
    for f in ["chain_1.csv", "chain_2.csv", "binder_community.csv", "psm_popularity.csv", "summary.txt"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
    let c = dcsbm(&["fit", cfg.to_str().unwrap(), "-o", "c", "--seed", "5"], tmp.path());
    assert!(c.status.success());
    assert_ne!(
        fs::read(tmp.path().join("a/chain_1.csv")).unwrap(),
        fs::read(tmp.path().join("c/chain_1.csv")).unwrap()
    );
}

#[test]
fn summarize_and_refit_read_a_finished_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated_run(tmp.path());
    assert!(dcsbm(&["fit", cfg.to_str().unwrap(), "-o", "fit"], tmp.path()).status.success());
    let run = tmp.path().join("fit");
    let before = fs::read(run.join("binder_community.csv")).unwrap();
    fs::remove_file(run.join("psm_community.svg")).unwrap();
    let out = dcsbm(&["summarize", "fit"], tmp.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(run.join("psm_community.svg").is_file());
    assert_eq!(fs::read(run.join("binder_community.csv")).unwrap(), before);

    let out = dcsbm(&["refit", "fit", "--iterations", "1200", "--burn-in", "200", "--chains", "2"], tmp.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let table = fs::read_to_string(run.join("refit.csv")).unwrap();
    assert!(table.starts_with("parameter,cluster,size,mean,sd,members"));
    let beta_rows: Vec<&str> = table.lines().filter(|l| l.starts_with("beta,")).collect();
    assert!(!beta_rows.is_empty());
    // Both planted blocks have within-rate 2.
    for row in beta_rows.iter().filter(|r| r.split(',').nth(2).unwrap().parse::<usize>().unwrap() >= 10) {
        let mean: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((mean - 2.0).abs() < 0.5, "{row}");
    }

    // A partition file of the wrong length is a usage error.
    fs::write(tmp.path().join("short.csv"), "node,label\n1,1\n2,1\n").unwrap();
    let out = dcsbm(&["refit", "fit", "--community", "short.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_data_is_a_usage_error_naming_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("model = static\ndata = nowhere/edges.txt\n{SHORT}"));
    let out = dcsbm(&["fit", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("nowhere/edges.txt"), "{}", stderr(&out));
    assert!(!tmp.path().join("run").exists());
}

#[test]
fn persistence_model_needs_two_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("g.txt"), "1 2\n2 3\n").unwrap();
    let cfg = write_config(tmp.path(), &format!("model = dynamic2\ndata = g.txt\n{SHORT}"));
    let out = dcsbm(&["fit", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("dynamic2"), "{}", stderr(&out));
}

#[test]
fn malformed_edge_list_reports_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("g.txt"), "1 2\n2 x\n").unwrap();
    let out = dcsbm(&["validate-data", "g.txt"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("g.txt") && err.contains('2'), "{err}");
}

#[test]
fn bad_override_and_unknown_command_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated_run(tmp.path());
    let out = dcsbm(&["fit", cfg.to_str().unwrap(), "--set", "no_such_key=1"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = dcsbm(&["fit", cfg.to_str().unwrap(), "--set", "burn_in=5000"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(dcsbm(&["frobnicate"], tmp.path()).status.code(), Some(2));
    assert_eq!(dcsbm(&["--help"], tmp.path()).status.code(), Some(0));
}

#[test]
fn output_directory_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = simulated_run(tmp.path());
    let out = Command::new(env!("CARGO_BIN_EXE_dcsbm"))
        .args(["fit", cfg.to_str().unwrap(), "--set", "iterations=300", "--set", "burn_in=100"])
        .current_dir(tmp.path())
        .env("DCSBM_OUTPUT_DIR", "from_env")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("from_env/run.meta").is_file());
}

#[test]
fn validate_data_counts_edges() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("a.txt"), "1 2\n2 3\n3 1\n").unwrap();
    fs::write(tmp.path().join("b.txt"), "1 2\n").unwrap();
    let out = dcsbm(&["validate-data", "a.txt", "b.txt"], tmp.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("n = 3, time points = 2"), "{text}");
    assert!(text.contains("snapshot 1: 3 edges") && text.contains("snapshot 2: 1 edges"), "{text}");
}

#[test]
fn dynamic_simulation_writes_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let sim_file = tmp.path().join("dyn.sim");
    fs::write(&sim_file, "model = dynamic2\nn = 12\ntime_points = 3\nblocks = 2\nbeta = 1.5\ntheta = -0.8\neta = 0.6\nseed = 2\n").unwrap();
    let out = dcsbm(&["simulate", sim_file.to_str().unwrap(), "-o", "d"], tmp.path());
    assert!(out.status.success(), "{}", stderr(&out));
    for t in 1..=3 {
        assert!(tmp.path().join(format!("d/snapshot_{t}.txt")).is_file());
    }
    let cfg = write_config(
        tmp.path(),
        "model = dynamic2\ndata = d/snapshot_1.txt, d/snapshot_2.txt, d/snapshot_3.txt\nchains = 1\niterations = 200\nburn_in = 100\nthin = 5\n",
    );
    let out = dcsbm(&["fit", cfg.to_str().unwrap(), "-o", "fit"], tmp.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(tmp.path().join("fit/eta_hist.csv").is_file());
    assert!(fs::read_to_string(tmp.path().join("fit/summary.txt")).unwrap().contains("eta: mean"));
}
