use std::process::Command;

use aomega::harness::{self, Config, ScenarioVerdict};

fn small_config(seed: u64) -> Config {
    Config::from_json(&format!(
        r#"{{"seed": {seed}, "scenarios": [
            {{"id": "iso", "kind": "isometry", "geometry": "disc", "weight": "power:alpha=1",
              "p": 2, "functions": ["random:3"], "tol": 1e-6}},
            {{"id": "rep", "kind": "representation", "geometry": "halfplane", "weight": "power:alpha=0",
              "p": 2, "functions": ["rational:[(1,1,2)]"], "tol": 1e-4, "points": [[0.3, 1.1]]}},
            {{"id": "ker", "kind": "kernel-identity", "geometry": "disc", "weight": "power:alpha=2",
              "tol": 1e-7}}
        ]}}"#
    ))
    .unwrap()
}

#[test]
fn reports_are_deterministic() {
    let cfg = small_config(7);
    let a = harness::report_json(&harness::run_all(&cfg, None).unwrap()).unwrap();
    let b = harness::report_json(&harness::run_all(&cfg, None).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scenario_results_do_not_depend_on_the_rest_of_the_config() {
    let cfg = small_config(7);
    let all = harness::run_all(&cfg, None).unwrap();
    for r in &all {
        let alone = Config {
            seed: cfg.seed,
            scenarios: cfg
                .scenarios
                .iter()
                .filter(|s| s.id == r.id)
                .cloned()
                .collect(),
        };
        let single = harness::run_all(&alone, None).unwrap();
        assert_eq!(single[0].measured, r.measured, "{}", r.id);
        let picked = harness::run_all(&cfg, Some(&r.id)).unwrap();
        assert_eq!(picked[0].measured, r.measured, "{}", r.id);
    }
}

#[test]
fn seed_changes_random_functions() {
    let a = harness::run_all(&small_config(1), Some("iso")).unwrap();
    let b = harness::run_all(&small_config(2), Some("iso")).unwrap();
    assert!(a[0].passed() && b[0].passed());
    assert_ne!(a[0].measured, b[0].measured);
}

#[test]
fn empty_config_passes() {
    let cfg = Config::from_json(r#"{"scenarios": []}"#).unwrap();
    let reports = harness::run_all(&cfg, None).unwrap();
    assert!(reports.is_empty());
    assert_eq!(harness::exit_code(&reports), 0);
}

#[test]
fn plane_p1_representation_is_refused() {
    let cfg = Config::from_json(
        r#"{"scenarios": [{"id": "p1", "kind": "representation", "geometry": "plane",
            "weight": "exp-simple", "p": 1, "functions": ["monomial:n=1"], "tol": 1e-6}]}"#,
    )
    .unwrap();
    let reports = harness::run_all(&cfg, None).unwrap();
    assert_eq!(reports[0].verdict, ScenarioVerdict::Refused);
    assert!(reports[0].message.is_some());
    assert_eq!(harness::exit_code(&reports), 1);
}

#[test]
fn unknown_scenario_id_is_an_error() {
    assert!(harness::run_all(&small_config(0), Some("nope")).is_err());
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let reports = harness::run_all(&small_config(0), None).unwrap();
    harness::write_outputs(&reports, dir.path()).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
    assert!(json[0].get("wall_time_s").is_none());
    let mut rd = csv::Reader::from_path(dir.path().join("summary.csv")).unwrap();
    assert_eq!(rd.headers().unwrap().len(), 8);
    assert_eq!(rd.records().count(), 3);
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aomega"))
}

#[test]
fn cli_verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");

    std::fs::write(&cfg, serde_json::to_string(&small_config(0)).unwrap()).unwrap();
    let out = cli()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("ok"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 3);

    std::fs::write(
        &cfg,
        r#"{"scenarios": [{"id": "p1", "kind": "representation", "geometry": "plane",
            "weight": "exp-simple", "p": 1, "functions": ["monomial:n=1"], "tol": 1e-6}]}"#,
    )
    .unwrap();
    let out = cli()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("refused"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    std::fs::write(&cfg, r#"{"scenarios": [{"id": "x"}]}"#).unwrap();
    let out = cli()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("bad"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cli_moments_and_kernel() {
    let out = cli()
        .args([
            "moments",
            "--geometry",
            "disc",
            "--weight",
            "power:alpha=1",
            "--n",
            "3",
            "--out",
            "json",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0.5"), "{text}");

    let out = cli()
        .args([
            "kernel",
            "--geometry",
            "halfplane",
            "--weight",
            "power:alpha=0",
            "--at",
            "0,-1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cli_reconstructs_half_plane_rational_at_default_tol() {
    let out = cli()
        .args([
            "reconstruct",
            "--geometry",
            "halfplane",
            "--weight",
            "linear:cap=1",
            "--function",
            "rational:[(1,1,2)]",
            "--at",
            "0,1",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let re = v[0]["value"][0].as_f64().unwrap();
    let im = v[0]["value"][1].as_f64().unwrap();
    // 1/(i + i)² = -1/4
    assert!((re + 0.25).abs() < 1e-9 && im.abs() < 1e-9, "{re} {im}");
}
