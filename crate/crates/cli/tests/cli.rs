use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn jobs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../jobs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wickquant"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_job_text(dir: &Path, text: &str, extra: &[&str]) -> Output {
    let path = dir.join("job.json");
    fs::write(&path, text).unwrap();
    let mut args = vec!["--job", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn wick_star_fixture_prints_canonical_form() {
    let job = jobs_dir().join("wick_star.json");
    let o = run(&["--job", job.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("f ⋆ g = y ȳ − ℏ"), "{}", stdout(&o));
}

#[test]
fn cp1_verify_reports_exact_matches_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let job = jobs_dir().join("cp1_verify.json");
    let o = run(&[
        "--job",
        job.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let peak = out
        .lines()
        .filter(|l| l.starts_with("EXACT MATCH peak-section"))
        .count();
    assert_eq!(peak, 4);
    assert!(!out.contains("MISMATCH"));
    let csv = fs::read_to_string(tmp.path().join("composition_N2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("m,p,q,exact_value,predicted_partial_sum,residual_float,fitted_order")
    );
    assert_eq!(lines.count(), 15);
    assert_eq!(
        fs::read_to_string(tmp.path().join("cp1_report.txt")).unwrap(),
        out
    );
}

#[test]
fn identical_jobs_give_identical_reports() {
    let job = jobs_dir().join("cp1_mobius.json");
    let a = run(&["--job", job.to_str().unwrap(), "--threads", "1"]);
    let b = run(&["--job", job.to_str().unwrap(), "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let tmp = tempfile::tempdir().unwrap();
    let suite = r#"{"mode": "suite", "inputs": {"cases": 20,
        "checks": ["associativity", "representation", "hermitian", "flat-reduction"]}}"#;
    let a = run_job_text(tmp.path(), suite, &["--seed", "7"]);
    let b = run_job_text(tmp.path(), suite, &["--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn other_modes_run() {
    for (name, needle) in [
        ("bt_eval.json", "C_1 = -1"),
        ("k_normalize.json", "R[0000] = -1/2"),
        ("rep_act.json", "T_f(alpha) = 2 ℏ y"),
    ] {
        let o = run(&["--job", jobs_dir().join(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).contains(needle), "{name}: {}", stdout(&o));
    }
}

#[test]
fn empty_job_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_job_text(tmp.path(), "", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert_ne!(run(&[]).status.code(), Some(0));
}

#[test]
fn parse_errors_carry_positions() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_job_text(
        tmp.path(),
        "{\n  \"mode\": \"wick-star\",\n  \"trunc\": \"four\"\n}",
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = run_job_text(
        tmp.path(),
        r#"{"mode": "wick-star", "trunc": 4, "inputs": {"f": [{"I": [1]}]}}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inputs.g"));
    let o = run_job_text(
        tmp.path(),
        r#"{"mode": "wick-star", "trunc": 4, "bogus": 1}"#,
        &[],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn truncation_ceiling_is_enforced() {
    let job = jobs_dir().join("wick_star.json");
    let o = run(&["--job", job.to_str().unwrap(), "--trunc-ceiling", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn computation_errors_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let job = r#"{"mode": "k-normalize", "trunc": 4,
                  "inputs": {"potential": [{"I": [1], "J": [1], "re": "-1"}]}}"#;
    let o = run_job_text(tmp.path(), job, &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("computation error"));
}
