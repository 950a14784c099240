use std::path::Path;
use std::process::{Command, Output};

fn twophase(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twophase"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TWOPHASE_OUT")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn manifest(dir: &Path) -> toml::Table {
    String::from_utf8(read(dir, "manifest.toml")).unwrap().parse().unwrap()
}

#[test]
fn spectrum_csv_has_schema_header_and_requested_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = twophase(&["spectrum"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(read(dir.path(), "spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# twophase spectrum schema v1"));
    let header = lines.next().unwrap();
    assert!(header.starts_with("s,r1_re,r1_im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 500);
    let width = header.split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == width));
}

#[test]
fn manifest_records_params_checks_and_artifact_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let out = twophase(&["spectrum", "--points", "50"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(dir.path());
    assert_eq!(m["subcommand"].as_str(), Some("spectrum"));
    assert_eq!(m["status"].as_str(), Some("pass"));
    assert_eq!(m["params"]["gamma"].as_float(), Some(2.0));
    let artifacts = m["artifacts"].as_array().unwrap();
    assert!(!artifacts.is_empty());
    for a in artifacts {
        let bytes = read(dir.path(), a["path"].as_str().unwrap());
        assert_eq!(a["sha256"].as_str().unwrap(), twophase::cli::hex_digest(&bytes));
    }
}

#[test]
fn repeated_runs_produce_identical_artifacts() {
    let args = ["evolve", "--n", "32", "--L", "8", "--t", "1", "--dt", "0.1", "--seed", "7"];
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    assert_eq!(twophase(&args, first.path()).status.code(), Some(0));
    assert_eq!(twophase(&args, second.path()).status.code(), Some(0));
    for name in ["evolve_diagnostics.csv", "evolve_slopes.csv", "manifest.toml"] {
        assert_eq!(read(first.path(), name), read(second.path(), name), "{name} differs");
    }
}

#[test]
fn linear_evolve_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = twophase(&["evolve", "--linear", "--n", "32", "--L", "8", "--t", "2", "--dt", "0.25"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("PASS evolve.linear_reference"), "{stdout}");
}

#[test]
fn failing_check_exits_one_and_marks_manifest() {
    // far too coarse a grid for a narrow source
    let dir = tempfile::tempdir().unwrap();
    let args = ["green", "--n", "32", "--L", "32", "--sigma", "0.3", "--t", "1", "--radii", "3", "--tol-quad", "1e-5"];
    let out = twophase(&args, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(manifest(dir.path())["status"].as_str(), Some("fail"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["evolve", "--n", "16"],
        vec!["evolve", "--eps0", "5"],
        vec!["spectrum", "--points", "1"],
        vec!["green", "--block", "19"],
        vec!["no-such-command"],
    ] {
        let out = twophase(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn invalid_parameter_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.toml");
    std::fs::write(&params, "mu = -1.0\n").unwrap();
    let out = twophase(&["spectrum", "--params", params.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("mu"), "{stderr}");
}

#[test]
fn parameter_file_overrides_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.toml");
    std::fs::write(&params, "mu = 2.0\nlambda = 0.5\n").unwrap();
    let out = twophase(&["spectrum", "--points", "20", "--params", params.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(dir.path());
    assert_eq!(m["params"]["mu"].as_float(), Some(2.0));
    assert_eq!(m["params"]["lambda"].as_float(), Some(0.5));
}

#[test]
fn output_directory_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_twophase"))
        .args(["spectrum", "--points", "10"])
        .env("TWOPHASE_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("spectrum.csv").exists());
}

#[test]
fn flag_overrides_take_precedence_over_parameter_file() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.toml");
    std::fs::write(&params, "mu = 2.0\n").unwrap();
    let args = ["spectrum", "--points", "20", "--params", params.to_str().unwrap(), "--set", "mu=3", "--set", "gamma=1.4"];
    assert_eq!(twophase(&args, dir.path()).status.code(), Some(0));
    let m = manifest(dir.path());
    assert_eq!(m["params"]["mu"].as_float(), Some(3.0));
    assert_eq!(m["params"]["gamma"].as_float(), Some(1.4));
    for bad in ["viscosity=1", "mu", "mu=abc", "gamma=0.5"] {
        assert_eq!(twophase(&["spectrum", "--set", bad], dir.path()).status.code(), Some(2), "{bad}");
    }
}

#[test]
fn thread_count_does_not_change_artifacts() {
    let args = ["evolve", "--n", "32", "--L", "8", "--t", "1", "--dt", "0.1"];
    let single = tempfile::tempdir().unwrap();
    let pooled = tempfile::tempdir().unwrap();
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    assert_eq!(twophase(&one, single.path()).status.code(), Some(0));
    assert_eq!(twophase(&args, pooled.path()).status.code(), Some(0));
    assert_eq!(read(single.path(), "evolve_diagnostics.csv"), read(pooled.path(), "evolve_diagnostics.csv"));
}
