use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, out: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schwarz-lab"))
        .current_dir(dir)
        .env_remove("SCHWARZ_LAB_OUT")
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn setup() -> TempDir {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("cosine.json"), r#"{"kind":"cosine"}"#).unwrap();
    fs::write(dir.path().join("step.json"), r#"{"kind":"expression-preset","name":"step"}"#).unwrap();
    dir
}

fn summary(dir: &Path, out: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(out).join("summary.json")).unwrap()).unwrap()
}

#[test]
fn step_data_into_cosine_metric_satisfies_every_bound() {
    let dir = setup();
    let o = run(dir.path(), "out", &["check-bounds", "--metric", "cosine.json", "--boundary", "step.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(dir.path(), "out");
    assert_eq!(s["passed"], true);
    assert_eq!(s["tolerances"]["eval_radius"], 0.95);
    for name in ["main", "kalajpos_gradient", "kalajpos_value", "distance_contraction"] {
        let csv = fs::read_to_string(dir.path().join("out").join(format!("{name}.csv"))).unwrap();
        assert!(csv.starts_with("z_re,z_im,lhs,rhs,slack"));
    }
    assert!(dir.path().join("out/metadata.json").exists());
}

#[test]
fn hyperbolic_example_reports_the_violation_with_exit_one() {
    let dir = setup();
    let o = run(dir.path(), "out", &["gallery", "--name", "negative-curvature", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let s = summary(dir.path(), "out");
    let quotient = s["result"]["computed"]["schwarz_quotient_at_0"].as_f64().unwrap();
    assert!((quotient - 3.0).abs() < 1e-9, "{quotient}");
    assert!(!s["result"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = setup();
    fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    let o = run(dir.path(), "out", &["curvature", "--metric", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("out/summary.json").exists());
}

#[test]
fn unknown_tolerance_label_and_bad_flags_exit_two() {
    let dir = setup();
    let o = run(dir.path(), "out", &["--tolerance", "bogus=1", "curvature", "--metric", "cosine.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), "out", &["gallery", "--name", "torus"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), "out", &["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn stalled_finite_difference_solve_exits_three_with_error_record() {
    let dir = setup();
    let o = run(
        dir.path(),
        "out",
        &["--tolerance", "fd_max_sweeps=3", "solve", "--metric", "cosine.json", "--boundary", "step.json", "--grid-n", "41"],
    );
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let record: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/error.json")).unwrap()).unwrap();
    assert_eq!(record["kind"], "no_convergence");
}

#[test]
fn identical_seeds_give_byte_identical_summaries() {
    let dir = setup();
    let args = ["--seed", "7", "check-bounds", "--metric", "cosine.json", "--boundary", "step.json", "--pairs", "200"];
    assert_eq!(run(dir.path(), "a", &args).status.code(), Some(0));
    assert_eq!(run(dir.path(), "b", &args).status.code(), Some(0));
    let a = fs::read(dir.path().join("a/summary.json")).unwrap();
    let b = fs::read(dir.path().join("b/summary.json")).unwrap();
    assert_eq!(a, b);
    let a = fs::read(dir.path().join("a/distance_contraction.csv")).unwrap();
    let b = fs::read(dir.path().join("b/distance_contraction.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tolerance_override_is_recorded() {
    let dir = setup();
    let o = run(dir.path(), "out", &["--tolerance", "check_slack=1e-7", "curvature", "--metric", "cosine.json", "--grid-n", "99"]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(dir.path(), "out");
    assert_eq!(s["tolerances"]["check_slack"], 1e-7);
    let csv = fs::read_to_string(dir.path().join("out/curvature.csv")).unwrap();
    assert_eq!(csv.lines().count(), 100);
}

#[test]
fn output_directory_defaults_from_environment() {
    let dir = setup();
    let o = Command::new(env!("CARGO_BIN_EXE_schwarz-lab"))
        .current_dir(dir.path())
        .env("SCHWARZ_LAB_OUT", "from-env")
        .args(["sweep", "--family", "psi", "--n-max", "20"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = summary(dir.path(), "from-env");
    assert_eq!(s["result"]["monotone"], true);
}

#[test]
fn lema_requires_a_unimodal_metric() {
    let dir = setup();
    fs::write(dir.path().join("exp.json"), r#"{"kind":"exponential","params":{"c":1.0}}"#).unwrap();
    let o = run(dir.path(), "out", &["lemma", "--which", "lema", "--metric", "exp.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), "out", &["lemma", "--which", "lema", "--metric", "cosine.json", "--grid-points", "201"]);
    assert_eq!(o.status.code(), Some(0));
}
