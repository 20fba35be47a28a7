use std::process::Command;

use coulomblab_cli::{parse_batch, run, CliError, ScenarioConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coulomblab"))
}

fn field(text: &str, column: &str, row: usize) -> String {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let k = reader.headers().unwrap().iter().position(|h| h == column).unwrap();
    reader.records().nth(row).unwrap().unwrap()[k].to_string()
}

#[test]
fn decompose_random_alpha_meets_tolerance() {
    let c = ScenarioConfig { mesh: Some("annulus:16".into()), alpha: Some("random:7".into()), ..ScenarioConfig::new("decompose") };
    let out = run(&c).unwrap();
    assert!(out.passed);
    let rel: f64 = field(&out.csv, "relative_max", 0).parse().unwrap();
    assert!(rel <= 1e-9);
}

#[test]
fn aps_diagonal_example_has_index_one() {
    let c = ScenarioConfig { l: Some("diag:1,-1,0".into()), proj: Some("nonpositive".into()), ..ScenarioConfig::new("aps") };
    let out = run(&c).unwrap();
    assert_eq!(field(&out.csv, "index", 0), "1");
    assert!(out.passed);
}

#[test]
fn empty_config_is_a_parse_error() {
    assert!(matches!(parse_batch(""), Err(CliError::ConfigParse(_))));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "").unwrap();
    let out = bin().arg("batch").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ConfigParse"));
}

#[test]
fn module_errors_are_qualified() {
    let c = ScenarioConfig { field: Some("no-such-field".into()), ..ScenarioConfig::new("conley") };
    let err = run(&c).unwrap_err();
    assert_eq!(err.code(), "conley::UnknownField");
    let c = ScenarioConfig { mesh: Some("torus2:4".into()), ..ScenarioConfig::new("decompose") };
    assert_eq!(run(&c).unwrap_err().code(), "doublecoulomb::EmptyBoundary");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["decompose", "--mesh", "pair-of-pants:6", "--seed", "3"],
        vec!["conley", "intersect", "--field", "saddle", "--res", "64"],
        vec!["aps", "--L", "random:5", "--seed", "9"],
    ] {
        let mut reports = Vec::new();
        for k in 0..2 {
            let path = dir.path().join(format!("{}-{k}.csv", args[0]));
            let status = bin().args(&args).arg("--report").arg(&path).status().unwrap();
            assert!(status.code().is_some());
            reports.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(reports[0], reports[1], "{args:?}");
    }
}

#[test]
fn batch_matches_single_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let config = serde_json::json!({"scenarios": [
        {"command": "decompose", "mesh": "disk:6", "seed": 2, "report": a},
        {"command": "spectral", "mesh": "circle:12", "report": b},
    ]});
    let path = dir.path().join("batch.json");
    std::fs::write(&path, config.to_string()).unwrap();
    let status = bin().arg("batch").arg(&path).env("COULOMBLAB_THREADS", "2").status().unwrap();
    assert_eq!(status.code(), Some(0));
    let single = run(&ScenarioConfig { mesh: Some("disk:6".into()), seed: Some(2), ..ScenarioConfig::new("decompose") }).unwrap();
    assert_eq!(std::fs::read_to_string(&a).unwrap(), single.csv);
    assert!(std::fs::read_to_string(&b).unwrap().contains("circle:12"));
}

#[test]
fn conley_svg_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("pair.svg");
    let out = bin().args(["conley", "--field", "saddle", "--svg"]).arg(&svg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(field(&stdout, "homology", 0), "0 1 0");
}

#[test]
fn svg_request_without_picture_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = ScenarioConfig {
        l: Some("diag:1".into()),
        svg: Some(dir.path().join("x.svg")),
        ..ScenarioConfig::new("aps")
    };
    assert!(matches!(run(&c), Err(CliError::ConfigParse(_))));
}

#[test]
fn bad_thread_cap_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("batch.json");
    std::fs::write(&path, r#"{"scenarios": [{"command": "aps", "L": "diag:1"}]}"#).unwrap();
    let out = bin().arg("batch").arg(&path).env("COULOMBLAB_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fda_linear_example_is_stable() {
    let out = run(&ScenarioConfig { field: Some("linear".into()), ..ScenarioConfig::new("fda") }).unwrap();
    assert!(out.passed);
    assert_eq!(out.csv.lines().count(), 4);
    for row in 0..3 {
        assert_eq!(field(&out.csv, "commutator", row), "0.000000e0");
    }
}
