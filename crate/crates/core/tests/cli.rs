use harmonic_geom::harness::cli::run_cli;
use harmonic_geom::harness::{Manifest, RunReport};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(
        std::iter::once("harmonic-geom").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn missing_manifest_is_a_usage_error() {
    let (code, _, err) = cli(&["check", "definitely-missing.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("definitely-missing.json"));
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(cli(&["frobnicate"]).0, 2);
    assert_eq!(cli(&["check"]).0, 2);
    assert_eq!(cli(&["--help"]).0, 0);
}

#[test]
fn malformed_manifests_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("garbage.json", "{ not json"),
        ("version.json", r#"{"version": 9, "charts": [], "checks": []}"#),
        (
            "unknown.json",
            r#"{"version": 1, "charts": [], "checks": [], "colour": "red"}"#,
        ),
    ];
    for (name, text) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, text).unwrap();
        let (code, out, _) = cli(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 2, "{name}");
        assert!(out.is_empty());
    }
}

#[test]
fn catalog_list_and_export() {
    let (code, out, _) = cli(&["catalog", "list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 7);
    assert!(out.contains("gaussian-shrinker"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s3.json");
    assert_eq!(cli(&["catalog", "export", "sphere-S3", path.to_str().unwrap()]).0, 0);
    let m = Manifest::load(&path).unwrap();
    assert_eq!(m.charts[0].name, "sphere3");
    assert_eq!(cli(&["catalog", "export", "nope", path.to_str().unwrap()]).0, 2);
}

#[test]
fn exported_entry_checks_clean_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gauss.json");
    let path = path.to_str().unwrap();
    cli(&["catalog", "export", "gaussian-shrinker", path]);
    let (code, json, _) = cli(&["check", path, "--format", "json"]);
    assert_eq!(code, 0);
    let report: RunReport = serde_json::from_str(&json).unwrap();
    assert!(report.all_met());
    assert!(report.wall_ms.is_none());

    let (code, text, _) = cli(&["check", path]);
    assert_eq!(code, 0);
    let soliton = report.checks.iter().find(|c| c.id == "soliton").unwrap();
    assert!(text.contains(&format!(
        "max={}",
        serde_json::to_string(&soliton.max_residual.unwrap()).unwrap()
    )));
    assert!(text.contains("0 expectation(s) missed"));
}

#[test]
fn timings_only_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.json");
    let path = path.to_str().unwrap();
    cli(&["catalog", "export", "flat-plane", path]);
    let (_, json, _) = cli(&["check", path, "--format", "json", "--timings"]);
    let report: RunReport = serde_json::from_str(&json).unwrap();
    assert!(report.wall_ms.is_some());
    assert!(report.checks.iter().all(|c| c.wall_ms.is_some()));
}

#[test]
fn tolerance_override_can_flip_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.json");
    let path = path.to_str().unwrap();
    cli(&["catalog", "export", "flat-plane", path]);
    // With a huge tolerance the expected failure of the dilation Killing check passes.
    let (code, json, _) = cli(&["check", path, "--tol", "100", "--format", "json"]);
    assert_eq!(code, 1);
    let report: RunReport = serde_json::from_str(&json).unwrap();
    let missed: Vec<_> = report
        .checks
        .iter()
        .filter(|c| !c.expectation_met)
        .map(|c| c.id.as_str())
        .collect();
    assert_eq!(missed, vec!["dil-not-killing"]);
}

#[test]
fn curvature_command() {
    let (code, out, _) = cli(&["curvature", "round-sphere-S2", "--at", "0.1,-0.2", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((doc["scalar_curvature"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(doc["christoffel"].as_array().unwrap().len(), 2);

    let (code, out, _) = cli(&["curvature", "hyperbolic-half-plane", "--at", "0,2"]);
    assert_eq!(code, 0);
    assert!(out.contains("scalar curvature: -2"));

    // Outside the domain box.
    assert_eq!(cli(&["curvature", "hyperbolic-half-plane", "--at", "0,0.1"]).0, 3);
    assert_eq!(cli(&["curvature", "flat-plane", "--at", "0,0", "--chart", "nope"]).0, 2);
}

#[test]
fn selftest_passes() {
    let (code, out, _) = cli(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("ok")).count(), 7);
}
