//! Golden tests of the binary: exit codes, stderr prefixes, and the
//! worked examples pinned to exact output.

use std::io::Write;
use std::process::{Command, Output};

fn meanform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanform"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(contents.as_bytes()).expect("write temp file");
    file
}

const NILPOTENT: &str = r#"{"rows":2,"cols":2,"data":[[[0.0,0.0],[1.0,0.0]],[[0.0,0.0],[0.0,0.0]]]}"#;

#[test]
fn mean_transform_of_nilpotent_halves_the_entry() {
    let file = write_temp(NILPOTENT);
    let out = meanform(&["transform", "--kind", "mean", file.path().to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(doc["rows"], 2);
    assert_eq!(doc["data"][0][1][0], 0.5);
    assert_eq!(doc["data"][0][0][0], 0.0);
    assert_eq!(doc["data"][1][0][0], 0.0);
}

#[test]
fn transform_of_a_fixed_point_round_trips_bit_identically() {
    // Mean transform fixes diagonal matrices, so emit(parse(doc)) must
    // reproduce the canonical input byte for byte.
    let canonical =
        r#"{"rows":2,"cols":2,"data":[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[2.0,0.0]]]}"#;
    let file = write_temp(canonical);
    let out = meanform(&["transform", "--kind", "mean", file.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_str(&out).trim_end(), canonical);
}

#[test]
fn polar_of_nilpotent_returns_exact_factors() {
    let file = write_temp(NILPOTENT);
    let out = meanform(&["polar", file.path().to_str().unwrap()]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["numerical_rank"], 1);
    assert_eq!(value["isometry_part"]["data"][0][1][0], 1.0);
    assert_eq!(value["modulus"]["data"][1][1][0], 1.0);
    assert_eq!(value["modulus"]["data"][0][0][0], 0.0);
}

#[test]
fn iterate_emits_the_csv_header_and_halving_norms() {
    let file = write_temp(NILPOTENT);
    let out = meanform(&["iterate", "--n", "3", file.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,norm,numerical_radius,step_distance"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert_eq!(first[1].parse::<f64>().unwrap(), 1.0);
    let second: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(second[1].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn shift_meanlimit_of_alternating_weights_prints_two() {
    let out = meanform(&["shift", "meanlimit", "--weights", "periodic:3,1"]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let limit = value["value"].as_f64().unwrap();
    assert!((limit - 2.0).abs() <= 1e-12, "limit = {limit}");
    let trace = value["trace"].as_array().unwrap();
    assert!(trace.len() > 4);
    assert_eq!(trace[0]["sup_weight"].as_f64().unwrap(), 3.0);
}

#[test]
fn shift_specradius_of_alternating_weights_is_sqrt_three() {
    let out = meanform(&["shift", "specradius", "--weights", "expr:2+(-1)^i"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let radius = value["value"].as_f64().unwrap();
    assert!((radius - 3f64.sqrt()).abs() <= 1e-6, "radius = {radius}");
}

#[test]
fn malformed_matrix_document_exits_two() {
    let file = write_temp("{\"rows\": 2, \"cols\":"); // truncated JSON
    let out = meanform(&["polar", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).starts_with("E2:"), "stderr: {}", stderr_str(&out));
    assert!(stdout_str(&out).is_empty());
}

#[test]
fn mismatched_document_shape_exits_two() {
    let file = write_temp(r#"{"rows":2,"cols":2,"data":[[[0.0,0.0]]]}"#);
    let out = meanform(&["classify", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).starts_with("E2:"));
}

#[test]
fn self_test_suite_exits_four_with_reports_on_stdout() {
    let out = meanform(&[
        "verify", "--suite", "self-test", "--trials", "3", "--seed", "1", "--dims", "2..3",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr_str(&out).contains("E4:"), "stderr: {}", stderr_str(&out));
    let reports: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(reports[0]["suite"], "self-test");
    assert_eq!(reports[0]["violations"], 3);
    assert_eq!(reports[0]["passed"], false);
}

#[test]
fn passing_suite_exits_zero_with_a_json_report() {
    let out = meanform(&[
        "verify", "--suite", "norm-chain", "--trials", "4", "--seed", "9", "--dims", "2..4",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_str(&out));
    let reports: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(reports[0]["suite"], "norm-chain");
    assert_eq!(reports[0]["passed"], true);
    assert_eq!(reports[0]["seed"], 9);
}

#[test]
fn unknown_suite_exits_one() {
    let out = meanform(&["verify", "--suite", "does-not-exist"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).starts_with("E1:"));
}

#[test]
fn malformed_dims_exit_one() {
    let out = meanform(&["verify", "--suite", "norm-chain", "--dims", "4..2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).starts_with("E1:"));
}

#[test]
fn bad_weight_spec_exits_two() {
    let out = meanform(&["shift", "specradius", "--weights", "geometric:1,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).starts_with("E2:"));
}

#[test]
fn bilateral_rule_is_rejected_by_radius_estimation() {
    let out = meanform(&["shift", "specradius", "--weights", "bilateral:periodic:3,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).starts_with("E2:"));
}

#[test]
fn lambda_with_mean_kind_is_a_usage_error() {
    let file = write_temp(NILPOTENT);
    let out = meanform(&[
        "transform", "--kind", "mean", "--lambda", "0.3", file.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).starts_with("E1:"));
}

#[test]
fn config_file_with_unknown_key_exits_two() {
    let config = write_temp("{\"n_maax\": 10}");
    let file = write_temp(NILPOTENT);
    let out = meanform(&[
        "polar", "--config", config.path().to_str().unwrap(), file.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).starts_with("E2:"));
}

#[test]
fn config_format_json_switches_tabular_output() {
    let config = write_temp("{\"format\": \"json\"}");
    let file = write_temp(NILPOTENT);
    let out = meanform(&[
        "iterate", "--n", "2",
        "--config", config.path().to_str().unwrap(),
        file.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["steps"][0]["norm"].as_f64().unwrap(), 1.0);
}

#[test]
fn flags_override_config_values() {
    // Config pins 1 step; the flag asks for 3 and must win (4 rows + header).
    let config = write_temp("{\"n_max\": 1, \"tolerances\": {\"stop\": 1e-30}}");
    let file = write_temp(NILPOTENT);
    let out = meanform(&[
        "iterate", "--n", "3",
        "--config", config.path().to_str().unwrap(),
        file.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_str(&out).lines().count(), 5);
}

#[test]
fn thread_env_var_must_be_a_positive_integer() {
    let out = Command::new(env!("CARGO_BIN_EXE_meanform"))
        .args(["shift", "specradius", "--weights", "periodic:2"])
        .env("MEANFORM_THREADS", "zero")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_str(&out).starts_with("E2:"));
}

#[test]
fn verify_reports_are_identical_across_thread_counts() {
    let run = |threads: &str| -> String {
        let out = Command::new(env!("CARGO_BIN_EXE_meanform"))
            .args([
                "verify", "--suite", "rank-one", "--trials", "8", "--seed", "5",
                "--dims", "2..4",
            ])
            .env("MEANFORM_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "stderr: {}", stderr_str(&out));
        let mut value: serde_json::Value =
            serde_json::from_str(&stdout_str(&out)).unwrap();
        // Wall-clock time is the one legitimately nondeterministic field.
        value[0]["elapsed_seconds"] = serde_json::json!(0);
        value.to_string()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    let out = meanform(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).starts_with("E1:"));
}

#[test]
fn help_exits_zero() {
    let out = meanform(&["--help"]);
    assert!(out.status.success());
    assert!(stdout_str(&out).contains("verify"));
}
