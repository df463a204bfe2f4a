use std::path::{Path, PathBuf};
use std::process::Command;

use cmv_mop::cli::{run, EXIT_CONFIG, EXIT_FACTORIZATION, EXIT_OK, EXIT_PERTURBATION, EXIT_TOLERANCE};
use serde_json::Value;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut full = vec!["cmvmop"];
    full.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn lebesgue_moments_single_row() {
    let cfg = configs().join("lebesgue.json");
    let (code, out, _) = invoke(&["moments", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let streams = v["data"]["streams"].as_array().unwrap();
    assert_eq!(streams.len(), 1);
    assert_eq!(streams[0]["moments"], serde_json::json!([[0, 1.0, 0.0]]));
}

#[test]
fn six_moment_streams_for_two_by_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.json", r#"{"random": {"q": 2, "p": 3, "degree": 2}}"#);
    let (code, out, _) = invoke(&["moments", "--config", &cfg, "--n", "3"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["data"]["streams"].as_array().unwrap().len(), 6);
}

#[test]
fn moments_csv() {
    let cfg = configs().join("cosine.json");
    let (code, out, _) = invoke(&["moments", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "row,col,k,re,im");
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "0,0,-1,5.0000000000000000e-1,0.0000000000000000e0");
}

#[test]
fn malformed_config_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\n  \"n\": 4,\n  \"measure\": [\n}");
    let (code, _, err) = invoke(&["moments", "--config", &cfg]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("line 4"), "{err}");
    let cfg = write_config(dir.path(), "field.json", r#"{"mesure": {}}"#);
    let (code, _, err) = invoke(&["moments", "--config", &cfg]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("mesure"), "{err}");
}

#[test]
fn flag_errors_are_config_errors() {
    assert_eq!(invoke(&["verify", "--margin", "1"]).0, EXIT_CONFIG);
    assert_eq!(invoke(&["verify", "--tol-override", "nope=1"]).0, EXIT_CONFIG);
    assert_eq!(invoke(&["verify", "--format", "xml"]).0, EXIT_CONFIG);
    assert_eq!(invoke(&["transform"]).0, EXIT_CONFIG);
    assert_eq!(invoke(&["transform", "christoffel"]).0, EXIT_CONFIG);
}

#[test]
fn verify_lebesgue_is_exact() {
    let (code, out, _) = invoke(&["verify", "--all", "--n", "24"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    for c in v["checks"].as_array().unwrap() {
        assert!(c["residual"].as_f64().unwrap() < 1e-12, "{c}");
    }
}

#[test]
fn shipped_configs_verify() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let p = entry.unwrap().path();
        let (code, _, err) = invoke(&["verify", "--all", "--config", p.to_str().unwrap()]);
        assert_eq!(code, EXIT_OK, "{}: {err}", p.display());
    }
}

#[test]
fn every_check_listed_once() {
    let cfg = configs().join("mixed_2x3.json");
    let (_, out, _) = invoke(&["verify", "--all", "--config", cfg.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let mut names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let total = names.len();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), total);
    assert!(names.contains(&"christoffel kernel connection") && names.contains(&"geronimus N D-check = D"));
}

#[test]
fn injected_moment_error_fails_biorthogonality() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "inj.json",
        r#"{"random": {"q": 1, "p": 2, "degree": 40}, "seed": 7, "n": 24, "inject": {"row": 5, "col": 7, "delta": [0.001, 0]}}"#,
    );
    let (code, out, _) = invoke(&["verify", "--config", &cfg]);
    assert_eq!(code, EXIT_TOLERANCE);
    let v: Value = serde_json::from_str(&out).unwrap();
    let bio = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "biorthogonality").unwrap();
    assert_eq!(bio["pass"], false);
}

#[test]
fn tolerance_override_applies() {
    let (code, out, _) = invoke(&["verify", "--config", configs().join("mixed_1x2.json").to_str().unwrap(), "--tol-override", "biorthogonality=0"]);
    assert_eq!(code, EXIT_TOLERANCE);
    assert!(out.contains("\"tolerance\":0.0000000000000000e0"));
}

#[test]
fn singular_minor_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "twin.json",
        r#"{"measure": {"q": 1, "p": 2, "entries": [
            {"row": 0, "col": 0, "ac_coeffs": [[0, 1, 0]]},
            {"row": 0, "col": 1, "ac_coeffs": [[0, 1, 0]]}]}}"#,
    );
    let (code, _, err) = invoke(&["factorize", "--config", &cfg]);
    assert_eq!(code, EXIT_FACTORIZATION);
    assert!(err.contains("minor 1"), "{err}");
}

#[test]
fn inadmissible_perturbations() {
    let dir = tempfile::tempdir().unwrap();
    let circle = write_config(
        dir.path(),
        "circle.json",
        r#"{"perturbation": {"entries": [{"leading": [1, 0], "roots": [[0, 1], [2, 0]]}]}}"#,
    );
    assert_eq!(invoke(&["transform", "christoffel", "--config", &circle]).0, EXIT_PERTURBATION);
    let repeated = write_config(
        dir.path(),
        "rep.json",
        r#"{"perturbation": {"entries": [{"leading": [1, 0], "roots": [[2, 0], [2, 0]]}]}}"#,
    );
    assert_eq!(invoke(&["transform", "geronimus", "--config", &repeated]).0, EXIT_PERTURBATION);
    let stray = write_config(
        dir.path(),
        "stray.json",
        r#"{"measure": {"q": 1, "p": 1, "entries": [{"row": 0, "col": 0, "ac_coeffs": [[0, 1, 0]], "atoms": [[3, 0, 1, 0]]}]},
            "perturbation": {"entries": [{"leading": [1, 0], "roots": [[2, 0], [0.5, 0]]}]}}"#,
    );
    assert_eq!(invoke(&["transform", "geronimus", "--config", &stray]).0, EXIT_PERTURBATION);
}

#[test]
fn kernels_csv_columns() {
    let cfg = configs().join("mixed_1x2.json");
    let (code, out, _) = invoke(&["kernels", "--config", cfg.to_str().unwrap(), "--format", "csv", "--n", "12"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "x_re,x_im,y_re,y_im,a,b,K_re,K_im");
    // p x q = 2 entries per pair, 10 pairs
    assert_eq!(lines.count(), 20);
}

#[test]
fn subcommands_run() {
    let cfg = configs().join("mixed_2x3.json");
    let cfg = cfg.to_str().unwrap();
    for cmd in [&["factorize"][..], &["families"], &["secondkind"], &["transform", "christoffel"], &["transform", "geronimus"]] {
        let mut args = cmd.to_vec();
        args.extend(["--config", cfg, "--n", "12"]);
        let (code, out, err) = invoke(&args);
        assert_eq!(code, EXIT_OK, "{cmd:?}: {err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn binary_output_is_byte_identical() {
    let exe = env!("CARGO_BIN_EXE_cmvmop");
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("mixed_1x2.json");
    let mut outputs = Vec::new();
    for (i, fmt) in ["json", "json", "csv", "csv"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}"));
        let status = Command::new(exe)
            .args(["kernels", "--config", cfg.to_str().unwrap(), "--seed", "5", "--format", fmt, "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert_eq!(status.status.code(), Some(EXIT_OK));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[2], outputs[3]);
    let status = Command::new(exe).args(["verify", "--margin", "0"]).output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_CONFIG));
}
