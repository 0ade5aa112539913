use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use boundary_forge::cli::report::Report;

const BIN: &str = env!("CARGO_BIN_EXE_boundary-forge");

fn problem(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("problems").join(name)
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("boundary-forge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str], path: &Path) -> Output {
    Command::new(BIN)
        .arg(args[0])
        .arg(path)
        .args(&args[1..])
        .output()
        .unwrap()
}

fn structured(args: &[&str], path: &Path) -> (i32, Report) {
    let mut all = args.to_vec();
    all.extend(["--format", "structured"]);
    let out = run(&all, path);
    let text = String::from_utf8(out.stdout).unwrap();
    (out.status.code().unwrap(), Report::from_json(&text).unwrap())
}

#[test]
fn stokes_report_passes() {
    let (code, report) = structured(&["report", "--trials", "20"], &problem("stokes.json"));
    assert_eq!(code, 0);
    assert!(report.passed);
    let real = report.realization.unwrap();
    assert_eq!(
        real.b,
        vec![vec!["0".to_string(), "1".into()], vec!["1".into(), "0".into()]]
    );
    assert!(real.a.iter().flatten().all(|x| x == "0"));
    assert!(report.harness.iter().all(|h| h.passed && h.passed_trials == h.trials));
}

#[test]
fn rank_failure_exits_one_with_witness() {
    let (code, report) = structured(&["check"], &problem("rank_deficient.json"));
    assert_eq!(code, 1);
    let rank = report.conditions.iter().find(|c| c.name == "rank").unwrap();
    assert!(!rank.passed);
    assert!(rank.witness.as_deref().unwrap().contains("s^2"));
}

#[test]
fn unbalanced_split_needs_two_point() {
    let path = problem("first_order.json");
    assert_eq!(run(&["split"], &path).status.code(), Some(1));
    let (code, report) = structured(&["split", "--two-point"], &path);
    assert_eq!(code, 0);
    let split = report.split.unwrap();
    assert!(split.residual < 1e-9);
    assert_eq!(split.p, 1);
}

#[test]
fn swap_flag_is_one_based() {
    let path = problem("first_order.json");
    let (code, report) = structured(&["realize", "--swap", "1"], &path);
    assert_eq!(code, 0);
    assert_eq!(report.realization.unwrap().swap, vec![1]);
    assert_eq!(run(&["realize", "--swap", "2"], &path).status.code(), Some(2));
    assert_eq!(run(&["realize", "--swap", "0"], &path).status.code(), Some(2));
}

#[test]
fn constrained_and_lagrange_verify() {
    for name in ["constrained.json", "beam.json"] {
        let (code, report) = structured(&["verify", "--trials", "15"], &problem(name));
        assert_eq!(code, 0, "{name}");
        assert!(!report.harness.is_empty(), "{name}");
    }
    assert_eq!(run(&["realize"], &problem("constrained.json")).status.code(), Some(2));
}

#[test]
fn interval_override_accepts_negative_endpoints() {
    let out = run(
        &["verify", "--interval", "-1/2", "3", "--trials", "5"],
        &problem("stokes.json"),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        run(&["verify", "--interval", "1", "1"], &problem("stokes.json"))
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_files_are_usage_errors() {
    let cases = [
        ("syntax.json", "{\"kind\": \"dirac\","),
        ("kind.json", r#"{"kind": "maxwell", "F": [[["1"]]], "E": [[["1"]]]}"#),
        ("entry.json", r#"{"kind": "dirac", "F": [[["x"]]], "E": [[["1"]]]}"#),
        (
            "shape.json",
            r#"{"kind": "dirac", "F": [[["1"]]], "E": [[["1"], ["0"]]]}"#,
        ),
        (
            "foreign.json",
            r#"{"kind": "dirac", "F": [[["1"]]], "E": [[["1"]]], "J": [[["1"]]]}"#,
        ),
        (
            "unknown.json",
            r#"{"kind": "dirac", "F": [[["1"]]], "E": [[["1"]]], "colour": 3}"#,
        ),
    ];
    for (name, body) in cases {
        let out = run(&["check"], &scratch(name, body));
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{name}");
    }
    assert_eq!(
        run(&["check"], Path::new("/nonexistent/problem.json")).status.code(),
        Some(2)
    );
    assert_eq!(run(&["bogus"], &problem("stokes.json")).status.code(), Some(2));
}

#[test]
fn skew_condition_failure_in_lagrange_and_skew_adjoint_kinds() {
    let lag = scratch(
        "bad_lagrange.json",
        r#"{"kind": "lagrange", "P": [[["1"]]], "S": [[["0", "1"]]]}"#,
    );
    let (code, report) = structured(&["check"], &lag);
    assert_eq!(code, 1);
    assert!(!report.passed);
    let skew = scratch("bad_skew.json", r#"{"kind": "skew_adjoint", "J": [[["0", "0", "1"]]]}"#);
    assert_eq!(run(&["boundary"], &skew).status.code(), Some(1));
}

#[test]
fn text_output_names_the_verdict() {
    let out = run(&["boundary"], &problem("stokes.json"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("boundary-forge boundary (skew_adjoint): PASS"));
    assert!(text.contains("Σ"));
}
