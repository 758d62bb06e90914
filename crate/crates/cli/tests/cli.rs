use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn sglab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sglab"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn default_check_passes_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = sglab(&["check", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["checks"].as_array().unwrap().len(), 7);
    assert_eq!(report["provenance"]["tool"], "sglab");
}

#[test]
fn invalid_eta_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = sglab(&[
        "check",
        "--eta",
        "3.5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));
}

#[test]
fn bethe_writes_a_converged_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = sglab(&["bethe", "--L", "8", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&dir.path().join("bethe.json"));
    assert!(doc["data"]["state"]["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(doc["data"]["state"]["roots"].as_array().unwrap().len(), 4);
    let csv = std::fs::read_to_string(dir.path().join("roots.csv")).unwrap();
    let hash = doc["provenance"]["config_hash"].as_str().unwrap();
    assert!(csv.lines().next().unwrap().contains(hash));
}

#[test]
fn free_fermion_mass_scan_has_unit_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = sglab(&[
        "scan",
        "--observable",
        "mass",
        "--source",
        "continuum",
        "--eta",
        "1.5707963267948966",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let fit = json(&dir.path().join("fit.json"));
    let slope = fit["data"]["summary"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 1e-12, "{slope}");
    let plot = std::fs::read_to_string(dir.path().join("plot.csv")).unwrap();
    assert!(plot.lines().any(|l| l == "x,y,fit"));
}

#[test]
fn oversized_sector_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = sglab(&[
        "diag",
        "--L",
        "40",
        "--M",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small chain\nL = 6\nM = 2\neta = 0.9\ntheta = 0.4\n",
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let out = sglab(&[
        "diag",
        "--config",
        cfg.to_str().unwrap(),
        "--M",
        "3",
        "--dump-operator",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&out_dir.join("report.json"));
    assert_eq!(report["provenance"]["config"]["M"], 3);
    assert_eq!(report["provenance"]["config"]["L"], 6);
    assert_eq!(report["summary"]["dim"], 20);
    let files: Vec<&str> = report["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        files,
        [
            "spectrum.csv",
            "spectrum.json",
            "operator.csv",
            "operator.json"
        ]
    );
    let triplets =
        sinegordon_core::io::read_operator_triplets(&out_dir.join("operator.csv")).unwrap();
    assert!(!triplets.is_empty());
}

#[test]
fn help_documents_csv_columns() {
    let out = sglab(&["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in [
        "spectrum.csv",
        "index,re,im",
        "theta,h,value,provenance",
        "x,y,fit",
    ] {
        assert!(text.contains(needle), "{needle}");
    }
}
