//! End-to-end checks of the binary: exit codes, error wording, CSV shape,
//! and flag/config precedence.

use std::path::Path;
use std::process::{Command, Output};

use qsearch_cli::csvout::{SCAN_HEADER, TRAJECTORY_HEADER};

fn qsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsearch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn a_missing_seed_is_a_config_error() {
    let out = qsearch(&["grover"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("seed"));
}

#[test]
fn unknown_config_keys_are_named_in_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nseeed = 7\n");
    let out = qsearch(&["grover", "--config", &cfg, "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("experiment.seeed"));
}

#[test]
fn oversized_perturbations_cite_the_assumption() {
    let out = qsearch(&["recursive", "--seed", "1", "--delta-t", "1.6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("small-perturbation"));
}

#[test]
fn dense_unitaries_beyond_the_cap_exit_with_the_capability_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nunitary = dense_random\n");
    let out = qsearch(&["grover", "--config", &cfg, "--seed", "1", "--n-qubits", "13"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oversized_joint_registers_exit_with_the_capability_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[workspace]\nancilla_qubits = 4\n");
    let out = qsearch(&["workspace", "--config", &cfg, "--seed", "1", "--n-qubits", "18"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn an_overflowing_recursion_depth_fails_fast() {
    let out = qsearch(&["recursive", "--seed", "1", "--n-qubits", "4", "--levels", "41"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("41"));
}

#[test]
fn workspace_iterative_rejects_a_nonidentity_unmarked_block() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[workspace]\nb_op = phase:0.3\n");
    let out = qsearch(&["workspace", "--config", &cfg, "--seed", "1", "--n-qubits", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("workspace.b_op"));
}

#[test]
fn trajectory_csv_has_the_fixed_header_and_empty_optionals() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let out = qsearch(&[
        "recursive",
        "--seed",
        "3",
        "--n-qubits",
        "6",
        "--levels",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRAJECTORY_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3); // levels 0..=2
    for row in rows {
        // the recursion records no plane angles, so both optional
        // columns stay empty
        assert!(row.ends_with(",,"), "row {row:?} should end with empty optionals");
        assert_eq!(row.matches(',').count(), 5);
    }
}

#[test]
fn hamiltonian_scans_use_the_time_probability_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let out = qsearch(&[
        "hamiltonian",
        "--seed",
        "2",
        "--n-qubits",
        "5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(SCAN_HEADER));
    // header + samples + 1 rows: the grid includes both endpoints
    assert_eq!(text.lines().count(), 2050);
}

#[test]
fn summaries_pair_predictions_with_measurements() {
    let out = qsearch(&["iterative", "--seed", "1", "--n-qubits", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("predicted_queries = "));
    assert!(text.contains("measured_queries = "));
    assert!(text.contains("measured_final_success = "));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[experiment]\nn_qubits = 4\nseed = 9\n");
    let out = qsearch(&["grover", "--config", &cfg, "--n-qubits", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("dim = 32"));
}

#[test]
fn the_matching_study_needs_the_exploratory_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[experiment]\ntargets = 1,5\nphi_list = 3.0,1.5\n",
    );
    let gated = qsearch(&["mismatch", "--config", &cfg, "--seed", "1", "--n-qubits", "6"]);
    // without the flag the subcommand runs the plain mismatch scenario
    assert_eq!(gated.status.code(), Some(0));
    assert!(stdout_of(&gated).contains("scenario = phase_mismatch"));

    let csv = dir.path().join("match.csv");
    let out = qsearch(&[
        "mismatch",
        "--exploratory",
        "--config",
        &cfg,
        "--seed",
        "1",
        "--n-qubits",
        "6",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("scenario = per_target_matching"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("target,phi,matching_gap,u_j0,initial_prob,max_prob,final_prob")
    );
    assert_eq!(text.lines().count(), 3); // header + one row per target
}

#[test]
fn sweep_needs_a_sweep_block() {
    let out = qsearch(&["sweep", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("sweep"));
}

#[test]
fn reruns_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = qsearch(&[
            "iterative",
            "--seed",
            "21",
            "--n-qubits",
            "8",
            "--targets",
            "5",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert!(!bytes_a.is_empty());
    assert_eq!(bytes_a, bytes_b);
}
