//! The `privgraph` binary: exit codes, outputs and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn privgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privgraph")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    fs::write(&p, text).unwrap();
    p
}

const SQUARE: &str = "# a weighted 4-cycle\nn 4\n0 1 3\n1 2 2.5\n2 3 2\n0 3 1.5\n";

fn suite(at_most: f64) -> String {
    format!(
        r#"
[[experiment]]
name = "tiny"
epsilon = 2.0
delta = 1e-6
trials = 3
seed = 11
generator = {{ family = "uniform", n = 6, m = 8 }}
mechanism = {{ kind = "cut" }}
metrics = ["max_cut_error"]
thresholds = [{{ metric = "max_cut_error", statistic = "median", at_most = {at_most} }}]
"#
    )
}

#[test]
fn eval_exit_code_follows_the_thresholds() {
    let dir = TempDir::new().unwrap();
    let pass = write(&dir, "pass.toml", &suite(1e9));
    let fail = write(&dir, "fail.toml", &suite(0.0));
    assert_eq!(code(&privgraph(&["eval", &pass])), 0);
    let out = privgraph(&["eval", &fail]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
    // `--config` is the same suite by another route.
    assert_eq!(code(&privgraph(&["--config", &pass, "eval"])), 0);
}

#[test]
fn eval_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "s.toml", &suite(1e9));
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    assert_eq!(code(&privgraph(&["eval", &cfg, "--output", &a])), 0);
    assert_eq!(code(&privgraph(&["eval", &cfg, "--output", &b])), 0);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn usage_and_input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&privgraph(&["spectral"])), 2);
    assert_eq!(code(&privgraph(&["no-such-command"])), 2);
    let bad = write(&dir, "bad.txt", "n 3\n0 7 1\n");
    assert_eq!(code(&privgraph(&["spectral", "--input", &bad, "--epsilon", "1"])), 2);
    let missing = path(&dir, "missing.txt");
    assert_eq!(code(&privgraph(&["cut", "--input", &missing, "--epsilon", "1", "--delta", "1e-6"])), 2);
    let g = write(&dir, "g.txt", SQUARE);
    assert_eq!(code(&privgraph(&["spectral", "--input", &g, "--epsilon", "-1"])), 2);
    assert_eq!(code(&privgraph(&["eval"])), 2);
}

fn loaded_vertices(p: &str) -> usize {
    privgraph::harness::io::load_graph(Path::new(p)).unwrap().n()
}

#[test]
fn releases_write_a_graph_with_the_same_vertex_set() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", SQUARE);
    let (s, c) = (path(&dir, "s.txt"), path(&dir, "c.txt"));
    let meta = path(&dir, "meta.json");
    let out = privgraph(&["--seed", "3", "spectral", "--input", &g, "--epsilon", "1", "--output", &s, "--meta", &meta]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(loaded_vertices(&s), 4);
    serde_json::from_str::<serde_json::Value>(&fs::read_to_string(&meta).unwrap()).unwrap();

    let out = privgraph(&["--seed", "3", "cut", "--input", &g, "--epsilon", "1", "--delta", "1e-6", "--output", &c]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(loaded_vertices(&c), 4);

    // Same seed, same release.
    let s2 = path(&dir, "s2.txt");
    privgraph(&["--seed", "3", "spectral", "--input", &g, "--epsilon", "1", "--output", &s2]);
    assert_eq!(fs::read(&s).unwrap(), fs::read(&s2).unwrap());
}

#[test]
fn oracle_max_cut_finds_the_single_edge() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.txt", "n 4\n0 1 1\n");
    let b = write(&dir, "b.txt", "n 4\n");
    let out = privgraph(&["oracle", "max-cut", "--a", &a, "--b", &b]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["error"].as_f64().unwrap(), 1.0);
}

#[test]
fn analytics_and_sampler_subcommands_run() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", SQUARE);
    let out = privgraph(&["analytics", "--input", &g, "--stat", "resistance", "--exact"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stdout.is_empty());
    let out = privgraph(&["analytics", "--input", &g, "--stat", "commute", "--private", "--epsilon", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = privgraph(&["sample", "--input", &g, "--k", "2", "--epsilon", "1", "--draws", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = privgraph(&["oracle", "sampler-test", "--probabilities", "0.2,0.5,0.7", "--k", "1", "--draws", "20000"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["tv_distance"].as_f64().unwrap() <= 0.02);
}
