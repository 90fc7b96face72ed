use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_taylor-lab");

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], jobs_env: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("TAYLOR_LAB_JOBS");
    if let Some(j) = jobs_env {
        cmd.env("TAYLOR_LAB_JOBS", j);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn run_config(cfg: &Path, out: &Path, extra: &[&str], jobs_env: Option<&str>) -> Output {
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args, jobs_env)
}

const SMALL_SPECTRAL: &str = r#"{"schema_version": 1, "kind": "spectral-check", "truncation": 32, "band": 2, "modes": [[1, 0]]}"#;

#[test]
fn small_spectral_check_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", SMALL_SPECTRAL);
    let out = run_config(&cfg, &tmp.path().join("out"), &[], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout
        .lines()
        .any(|l| l.starts_with("PASS eigenvalue_match")));
    assert!(tmp.path().join("out/report.json").exists());
}

#[test]
fn truncation_guard_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "kind": "spectral-check", "truncation": 8, "band": 8}"#,
    );
    let out = run_config(&cfg, &tmp.path().join("out"), &[], None);
    assert_eq!(code(&out), 2);
    assert!(!tmp.path().join("out/report.json").exists());
}

#[test]
fn malformed_input_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.json", "{ not json");
    assert_eq!(code(&run_config(&bad, &tmp.path().join("a"), &[], None)), 2);
    let unknown = write_config(
        tmp.path(),
        "unknown.json",
        r#"{"schema_version": 1, "kind": "spectral-check", "colour": 3}"#,
    );
    assert_eq!(
        code(&run_config(&unknown, &tmp.path().join("b"), &[], None)),
        2
    );
    let missing = tmp.path().join("absent.json");
    assert_eq!(
        code(&run_config(&missing, &tmp.path().join("c"), &[], None)),
        2
    );
    let cfg = write_config(tmp.path(), "c.json", SMALL_SPECTRAL);
    assert_eq!(
        code(&run_config(
            &cfg,
            &tmp.path().join("d"),
            &["--jobs", "0"],
            None
        )),
        2
    );
    assert_eq!(
        code(&run_config(&cfg, &tmp.path().join("e"), &[], Some("many"))),
        2
    );
}

#[test]
fn impossible_tolerance_fails_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "kind": "spectral-check", "truncation": 32, "band": 2, "tolerances": {"eigenvalue_rel": 0.0, "structure": 0.0}}"#,
    );
    let out = run_config(&cfg, &tmp.path().join("out"), &[], None);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["passed"], false);
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "kind": "abscissa-sweep", "truncation": 16, "band": 2, "modes": [[1, 0], [2, 0], [4, 0]], "geostrophic_demo": true}"#,
    );
    let one = tmp.path().join("one");
    let many = tmp.path().join("many");
    assert_eq!(
        code(&run_config(&cfg, &one, &["--jobs", "1"], Some("4"))),
        0
    );
    assert_eq!(code(&run_config(&cfg, &many, &[], Some("3"))), 0);
    let (a, b) = (tree(&one), tree(&many));
    assert!(a.iter().any(|(n, _)| n.ends_with(".svg")));
    assert!(a.iter().any(|(n, _)| n.ends_with(".csv")));
    assert_eq!(a, b);
}

#[test]
fn zero_initial_data_has_zero_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "kind": "evolve", "truncation": 16, "band": 2, "modes": [[1, 0]],
            "t_final": 0.1, "output_step": 0.05, "initial": "zero"}"#,
    );
    let out = tmp.path().join("out");
    assert_eq!(code(&run_config(&cfg, &out, &[], None)), 0);
    let csv = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "energy").unwrap();
    let rows: Vec<f64> = lines
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|&e| e == 0.0));
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "kind": "constraint-check", "truncation": 16, "band": 2, "samples": 3, "seed": 1}"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(code(&run_config(&cfg, &a, &["--seed", "99"], None)), 0);
    assert_eq!(code(&run_config(&cfg, &b, &[], None)), 0);
    let seed = |dir: &Path| -> u64 {
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(seed(&a), 99);
    assert_eq!(seed(&b), 1);
    assert_ne!(
        fs::read(a.join("constraint_residuals.csv")).unwrap(),
        fs::read(b.join("constraint_residuals.csv")).unwrap()
    );
}
