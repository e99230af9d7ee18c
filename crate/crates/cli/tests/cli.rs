use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn graphonlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphonlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const TWO_BLOCK: &str = r#"{"type":"step","masses":[1.0,1.0],"values":[[1.0,-1.0],[-1.0,1.0]]}"#;
const SWAPPED: &str = r#"{"type":"step","masses":[0.5,1.5],"values":[[0.2,0.9],[0.9,0.4]]}"#;
const ORIGINAL: &str = r#"{"type":"step","masses":[1.5,0.5],"values":[[0.4,0.9],[0.9,0.2]]}"#;

#[test]
fn cutnorm_reports_value_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "w.json", TWO_BLOCK);
    let v = stdout_json(&graphonlab(&["cutnorm", "--spec", &spec, "--mode", "exact"]));
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["exact"], true);
}

#[test]
fn cutdist_of_relabelled_blocks_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", ORIGINAL);
    let b = write(dir.path(), "b.json", SWAPPED);
    let v = stdout_json(&graphonlab(&["cutdist", "--a", &a, "--b", &b, "--mode", "exact"]));
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["mode"], "exact");
    assert!(v.get("witness").is_some() && v.get("quantization_error").is_some());
    let v = stdout_json(&graphonlab(&[
        "cutdist", "--a", &a, "--b", &b, "--mode", "anneal", "--budget", "2000", "--seed", "3",
    ]));
    assert_eq!(v["value"], 0.0);
}

#[test]
fn sample_then_count_motifs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "w.json", r#"{"type":"step","masses":[1.0],"values":[[0.5]]}"#);
    let trace = dir.path().join("trace.json");
    let out = graphonlab(&[
        "sample", "--spec", &spec, "--t", "30", "--seed", "7", "--keep-isolated", "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(t["horizon"], 30.0);
    assert!(t["vertices"].as_array().unwrap().len() > 5);
    let v = stdout_json(&graphonlab(&[
        "hom", "--motif", "edge", "--graph", trace.to_str().unwrap(), "--at", "30",
    ]));
    assert_eq!(v["h"], 1.0);
}

#[test]
fn analytic_density_of_one_block() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "w.json", r#"{"type":"step","masses":[1.0],"values":[[0.5]]}"#);
    let v = stdout_json(&graphonlab(&[
        "hom", "--motif", "triangle", "--spec", &spec, "--analytic", "--mc", "1e4", "--seed", "5",
    ]));
    let h = v["value"].as_f64().unwrap();
    assert!((h - 0.5f64.powf(1.5)).abs() < 1e-12);
    assert_eq!(v["divergent"], false);
}

#[test]
fn tailreg_writes_profile_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("profile.csv");
    let out = graphonlab(&[
        "tailreg", "--graphs", "clique_example1:n=100,400", "--eps", "0.1", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("graph_id,n,num_edges,M_grid,share"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "clique_example1_100");
    assert_eq!(first[2], (31 * 30 / 2).to_string());
}

#[test]
fn experiment_exit_code_follows_checks() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.json",
        r#"{"experiment":"cut_norm_oracle","replicas":10,"seed":1}"#,
    );
    let out_dir = dir.path().join("results");
    let out = graphonlab(&["experiment", "--config", &good, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    for ext in ["csv", "json", "svg"] {
        assert!(out_dir.join(format!("cut_norm_oracle.{ext}")).exists());
    }
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"experiment":"cut_norm_oracle","replicas":10,"seed":1,"params":{"tolerance":-1.0}}"#,
    );
    let out = graphonlab(&["experiment", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn experiment_describe_lists_columns() {
    let out = graphonlab(&["experiment", "metric_convergence", "--describe"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("replica,parameter,metric,value"));
    assert!(text.contains("\"experiment\": \"metric_convergence\""));
}

#[test]
fn errors_exit_with_code_two() {
    let out = graphonlab(&["experiment", "no_such_experiment"]);
    assert_eq!(out.status.code(), Some(2));
    let out = graphonlab(&["cutnorm", "--spec", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
}
