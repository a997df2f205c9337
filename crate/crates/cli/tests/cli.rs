use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netconcord"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

fn matching_files() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.txt", "1 2\n3 4\n");
    write(dir.path(), "y.csv", "node_label,value\n1,1\n2,1\n3,-1\n4,-1\n");
    dir
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn estimate_on_matching_prints_two() {
    let dir = matching_files();
    let out = run(dir.path(), &["estimate", "--graph", "edges.txt", "--outcomes", "y.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "estimate");
    assert_eq!(v["c_hat"].as_f64(), Some(2.0));
    assert_eq!(v["schema_version"].as_u64(), Some(1));
}

#[test]
fn zero_gamma_c_flag_drops_complement() {
    let dir = matching_files();
    let out = run(
        dir.path(),
        &["estimate", "--graph", "edges.txt", "--outcomes", "y.csv", "--zero-gamma-c"],
    );
    let v = json(&out);
    assert_eq!(v["gamma_hat_c"].as_f64(), Some(0.0));
    assert_eq!(v["c_hat"].as_f64(), Some(1.0));
}

#[test]
fn unmatched_label_is_alignment_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "edges.txt", "a b\nb c\nc d\nd e\ne a\nf g\n");
    write(
        dir.path(),
        "y.csv",
        "node_label,value\na,1\nb,2\nc,3\nd,4\ne,5\nf,6\nzz,7\n",
    );
    let out = run(dir.path(), &["estimate", "--graph", "edges.txt", "--outcomes", "y.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("zz"), "stderr: {err}");
}

#[test]
fn malformed_edge_line_reports_line_number() {
    let dir = matching_files();
    write(dir.path(), "edges.txt", "1 2\n3\n");
    let out = run(dir.path(), &["estimate", "--graph", "edges.txt", "--outcomes", "y.csv"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
}

#[test]
fn constant_outcomes_exit_with_degeneracy_code() {
    let dir = matching_files();
    write(dir.path(), "y.csv", "node_label,value\n1,3\n2,3\n3,3\n4,3\n");
    let out = run(dir.path(), &["estimate", "--graph", "edges.txt", "--outcomes", "y.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_flag_value_is_usage_error() {
    let dir = matching_files();
    let out = run(
        dir.path(),
        &["ci", "--graph", "edges.txt", "--outcomes", "y.csv", "--alpha", "abc"],
    );
    assert_eq!(out.status.code(), Some(2));
}

fn generated_graph(dir: &Path) {
    let out = run(
        dir,
        &["gen-graph", "--family", "er", "--n", "60", "--lambda", "3", "--seed", "4", "-o", "g.txt"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(
        dir,
        &[
            "gen-outcomes", "--graph", "g.txt", "--vertices", "g.txt.vertices", "--c", "0.5",
            "--seed", "2", "-o", "y.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_then_infer_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    generated_graph(dir.path());
    let sidecar: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g.txt.json")).unwrap()).unwrap();
    assert_eq!(sidecar["generator"], "erdos_renyi");
    assert_eq!(sidecar["degree_stats"]["n"].as_u64(), Some(60));

    let args = [
        "--graph", "g.txt", "--vertices", "g.txt.vertices", "--outcomes", "y.csv",
        "--permutations", "200", "--seed", "9",
    ];
    let ci = run(dir.path(), &[&["ci"][..], &args].concat());
    assert_eq!(ci.status.code(), Some(0), "{}", String::from_utf8_lossy(&ci.stderr));
    let v = json(&ci);
    assert_eq!(v["kind"], "inference_result");
    assert!(v["ci_lower"].as_f64().unwrap() <= v["c_hat"].as_f64().unwrap());
    assert!(v["c_hat"].as_f64().unwrap() <= v["ci_upper"].as_f64().unwrap());
    assert_eq!(v["n_permutations"].as_u64(), Some(200));

    // same seed, same bytes, regardless of execution mode
    let again = run(dir.path(), &[&["ci", "--sequential"][..], &args].concat());
    assert_eq!(ci.stdout, again.stdout);

    let test = run(dir.path(), &[&["test", "--format", "csv"][..], &args].concat());
    assert_eq!(test.status.code(), Some(0));
    let text = String::from_utf8(test.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().next().unwrap().contains("reject"));
}

#[test]
fn diagnose_warns_on_dense_graph_and_tolerates_hubs() {
    let dir = tempfile::tempdir().unwrap();
    // star: the hub touches everyone, which the estimators reject
    write(dir.path(), "star.txt", "0 1\n0 2\n0 3\n0 4\n");
    let out = run(dir.path(), &["diagnose", "--graph", "star.txt"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["d_mx"].as_u64(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn homophily_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "e.txt", "1 2\n3 4\n");
    write(dir.path(), "t.csv", "node_label,value\n1,t\n2,t\n3,s\n4,s\n");
    let out = run(
        dir.path(),
        &["homophily", "--graph", "e.txt", "--types", "t.csv", "--type-label", "t"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["ih"].as_f64(), Some(1.0));
}

#[test]
fn true_gc_reports_standard_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "e.txt", "1 2\n");
    write(dir.path(), "v.txt", "1\n2\n3\n");
    let out = run(
        dir.path(),
        &["true-gc", "--graph", "e.txt", "--vertices", "v.txt", "--c", "0.6", "--reps", "20000"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 0.24).abs() < 0.03);
    assert!(v["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_emits_json_and_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "cfg.json",
        r#"[{"graph": {"family": "erdos_renyi", "n": 40, "lambda": 2.0}, "c": 0.0,
             "mc_reps": 10, "permutations": 30, "master_seed": 1},
            {"graph": {"family": "barabasi_albert", "n": 40, "m": 2}, "c": 0.3,
             "mc_reps": 10, "permutations": 30, "true_gc_reps": 200, "master_seed": 1}]"#,
    );
    let out = run(dir.path(), &["simulate", "--config", "cfg.json", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);

    write(
        dir.path(),
        "one.json",
        r#"{"graph": {"family": "erdos_renyi", "n": 40, "lambda": 2.0}, "c": 0.0,
            "mc_reps": 10, "permutations": 30}"#,
    );
    let out = run(dir.path(), &["simulate", "--config", "one.json"]);
    let v = json(&out);
    assert_eq!(v["kind"], "simulation_report");
    assert_eq!(v["true_gc"].as_f64(), Some(0.0));

    write(dir.path(), "bad.json", r#"{"graph": {"family": "erdos_renyi", "n": 40, "lambda": 2.0}, "c": 0.0, "mc_reps": 0}"#);
    let out = run(dir.path(), &["simulate", "--config", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
}
