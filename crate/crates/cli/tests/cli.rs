//! End-to-end tests of the binary: golden outputs, cache semantics, format
//! parity, sweep configuration, and the exit code contract.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run_in(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strange-lab"))
        .args(args)
        .env("STRANGE_LAB_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_str(&stdout_of(out)).expect("json stdout")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn expand_prints_the_fishburn_values() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &["expand", "--family", "F", "--r", "1", "--s", "0", "--N", "1", "--order", "6"],
    );
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    let rows: Vec<&str> = value["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| row[0].as_str().unwrap())
        .collect();
    assert_eq!(rows, ["1", "1", "2", "5", "15", "53"]);
    assert_eq!(value["stabilized"], Value::Bool(true));
}

#[test]
fn expand_at_the_second_root_prints_the_stabilized_row() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &["expand", "--family", "F", "--r", "1", "--s", "0", "--N", "2", "--order", "23"],
    );
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    // Row 22 of the stabilized table. Truncating the generating sum at
    // height 30 instead gives -3374324885490973100341136883972043 for this
    // row; the table is computed past its stabilization height, so that
    // partial value never appears here.
    assert_eq!(
        value["values"][22][0].as_str().unwrap(),
        "6755269265801720830066628757557"
    );
}

#[test]
fn torus_level_one_expands_as_the_plain_family() {
    let dir_f = TempDir::new().unwrap();
    let dir_ft = TempDir::new().unwrap();
    let args_f = ["expand", "--family", "F", "--r", "1", "--s", "0", "--N", "1", "--order", "6"];
    let args_ft =
        ["expand", "--family", "Ft", "--t", "1", "--r", "1", "--s", "0", "--N", "1", "--order", "6"];
    let out_f = run_in(dir_f.path(), &args_f);
    let out_ft = run_in(dir_ft.path(), &args_ft);
    assert_eq!(code_of(&out_f), 0);
    assert_eq!(code_of(&out_ft), 0);
    assert_eq!(stdout_of(&out_f), stdout_of(&out_ft));
}

#[test]
fn cache_round_trip_is_bit_identical_and_a_hit_is_served_as_stored() {
    let dir = TempDir::new().unwrap();
    let args = ["expand", "--family", "F", "--r", "1", "--order", "6"];
    let first = run_in(dir.path(), &args);
    assert_eq!(code_of(&first), 0, "{}", stderr_of(&first));
    let second = run_in(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout, "cached reload must be bit-identical");

    let entry = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "json"))
        .expect("one cache entry");
    let body = std::fs::read_to_string(&entry).unwrap();
    assert!(body.contains("\"53\""));

    // A well-formed entry is authoritative: edit a stored value and the
    // next run prints the edited number, proving nothing was recomputed.
    std::fs::write(&entry, body.replace("\"53\"", "\"54\"")).unwrap();
    let third = run_in(dir.path(), &args);
    assert_eq!(code_of(&third), 0);
    assert!(stdout_of(&third).contains("\"54\""));
    assert!(!stdout_of(&third).contains("\"53\""));
}

#[test]
fn cache_entries_under_another_schema_tag_are_recomputed() {
    let dir = TempDir::new().unwrap();
    let args = ["expand", "--family", "F", "--r", "1", "--order", "6"];
    run_in(dir.path(), &args);
    let entry = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|x| x == "json"))
        .expect("one cache entry");
    let body = std::fs::read_to_string(&entry).unwrap();
    let poisoned = body.replace("xitable/v1", "xitable/v0").replace("\"53\"", "\"54\"");
    std::fs::write(&entry, poisoned).unwrap();

    let out = run_in(dir.path(), &args);
    assert_eq!(code_of(&out), 0);
    assert!(stdout_of(&out).contains("\"53\""), "stale schema must recompute");
    let rewritten = std::fs::read_to_string(&entry).unwrap();
    assert!(rewritten.contains("xitable/v1"));
    assert!(rewritten.contains("\"53\""));
}

#[test]
fn csv_and_json_expansions_carry_the_same_numbers() {
    let dir = TempDir::new().unwrap();
    let args = ["expand", "--family", "F", "--r", "1", "--s", "0", "--N", "2", "--order", "10"];
    let json_out = run_in(dir.path(), &args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_out = run_in(dir.path(), &csv_args);
    assert_eq!(code_of(&json_out), 0);
    assert_eq!(code_of(&csv_out), 0);

    let values = json_of(&json_out)["values"].as_array().unwrap().clone();
    let csv = stdout_of(&csv_out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,c0"));
    for (n, line) in lines.enumerate() {
        let (idx, cell) = line.split_once(',').unwrap();
        assert_eq!(idx, n.to_string());
        assert_eq!(cell, values[n][0].as_str().unwrap());
    }
    assert_eq!(values.len(), 10);
}

#[test]
fn csv_and_json_coefficients_carry_the_same_numbers() {
    let dir = TempDir::new().unwrap();
    let args = ["coeffs", "--t", "2", "--p", "5", "--n-max", "1"];
    let json_out = run_in(dir.path(), &args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let csv_out = run_in(dir.path(), &csv_args);
    assert_eq!(code_of(&json_out), 0);
    assert_eq!(code_of(&csv_out), 0);

    let entries = json_of(&json_out)["entries"].as_array().unwrap().clone();
    let csv = stdout_of(&csv_out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,equal,b,b_derivative"));
    for (row, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let b: Vec<String> = entries[row]["coeffs"]["b"]["coords"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_str().unwrap().to_string())
            .collect();
        assert_eq!(cells[0], row.to_string());
        assert_eq!(cells[1], "true");
        assert_eq!(cells[2], b.join(";"));
        assert_eq!(cells[3], cells[2], "both routes print the same coordinates");
    }
}

#[test]
fn sets_prints_the_starred_pentagonal_set() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["sets", "--p", "7", "--r", "2", "--s", "0", "--star"]);
    assert_eq!(code_of(&out), 0);
    let value = json_of(&out);
    assert_eq!(value["kind"], "S_star");
    assert_eq!(value["members"], serde_json::json!([0, 2, 3]));
    assert_eq!(value["max"], 3);
}

#[test]
fn sets_rejects_a_composite_modulus() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["sets", "--p", "6", "--r", "1", "--s", "0"]);
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("prime"));
}

#[test]
fn dissect_prints_all_parts_and_a_reassembly_hash() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["dissect", "--family", "F", "--p", "5", "--height", "9"]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    assert_eq!(value["parts"].as_array().unwrap().len(), 5);
    assert_eq!(value["reassembles"], Value::Bool(true));
    let hash = value["reassembly_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));

    // The same split in CSV leads with the hash and keeps the same parts.
    let csv_out = run_in(
        dir.path(),
        &["dissect", "--family", "F", "--p", "5", "--height", "9", "--format", "csv"],
    );
    let csv = stdout_of(&csv_out);
    assert!(csv.starts_with(&format!("# reassembly_sha256={hash}\n")));
    assert!(csv.contains("part,exponent,c0"));
}

#[test]
fn coeffs_agree_on_both_routes() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["coeffs", "--t", "2", "--p", "5", "--n-max", "2"]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    assert_eq!(value["all_equal"], Value::Bool(true));
    let entries = value["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for entry in entries {
        assert_eq!(entry["equal"], Value::Bool(true));
    }
}

#[test]
fn verify_passes_the_squared_congruence_at_five() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "verify", "--theorem", "main1", "--r", "1", "--s", "0", "--N", "2", "--p", "5",
            "--lambda", "2", "--m-max", "2",
        ],
    );
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    assert_eq!(value["all_passed"], Value::Bool(true));
    assert_eq!(value["j_range"], serde_json::json!([1, 2]));
    assert_eq!(value["verdicts"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_passes_the_starred_torus_sweep_at_twenty_three() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &["verify", "--theorem", "cor3", "--p", "23", "--lambda", "1", "--m-max", "2", "--star"],
    );
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    assert_eq!(value["all_passed"], Value::Bool(true));
    assert_eq!(value["j_range"], serde_json::json!([1, 2, 3, 4, 5]));
    assert_eq!(value["verdicts"].as_array().unwrap().len(), 10);
    assert_eq!(value["spec"]["family"], "Ft");
    assert_eq!(value["spec"]["t"], 2);
}

#[test]
fn verify_runs_the_lemma_suite() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["verify", "--theorem", "lemmas", "--t", "2", "--p", "7"]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    assert_eq!(value["all_passed"], Value::Bool(true));
    let checks = value["checks"].as_array().unwrap();
    for group in [
        "alpha-stability",
        "strong-divisibility",
        "dissection-identity",
        "moment-identity",
        "series-inversion",
    ] {
        assert!(
            checks.iter().any(|c| c["group"] == group && c["outcome"] == "pass"),
            "missing passing {group} check"
        );
    }
    assert!(checks.iter().all(|c| c["outcome"] != "fail"));
}

#[test]
fn lemma_checks_without_a_progression_class_are_skipped_not_failed() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["verify", "--theorem", "lemmas", "--t", "2", "--p", "5"]);
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let value = json_of(&out);
    assert_eq!(value["all_passed"], Value::Bool(true));
    let checks = value["checks"].as_array().unwrap();
    let dissection: Vec<&Value> = checks
        .iter()
        .filter(|c| c["group"] == "dissection-identity")
        .collect();
    assert!(!dissection.is_empty());
    for check in dissection {
        assert_eq!(check["outcome"], "skipped");
        assert!(check["note"].as_str().unwrap().contains("no progression class"));
    }
}

#[test]
fn star_gate_violations_exit_two_and_name_the_condition() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["verify", "--theorem", "cor3", "--p", "5", "--star"]);
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("no progression class"));

    let out = run_in(
        dir.path(),
        &[
            "verify", "--theorem", "main1", "--r", "1", "--s", "0", "--N", "2", "--p", "5",
            "--star",
        ],
    );
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("does not divide"));
}

#[test]
fn precondition_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["verify", "--theorem", "main1", "--r", "7", "--p", "7"]);
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("divides"));

    let out = run_in(dir.path(), &["expand", "--family", "Ft", "--r", "1", "--order", "3"]);
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("requires --t"));

    let out = run_in(dir.path(), &["expand", "--family", "F", "--r", "0", "--order", "3"]);
    assert_eq!(code_of(&out), 2);

    let out = run_in(dir.path(), &["expand", "--family", "F", "--r", "1", "--order", "0"]);
    assert_eq!(code_of(&out), 2);

    // Unknown flags are usage errors too.
    let out = run_in(dir.path(), &["expand", "--no-such-flag"]);
    assert_eq!(code_of(&out), 2);
}

#[test]
fn config_file_supplies_the_sweep_box_and_format() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("lab.toml");
    std::fs::write(&config, "p = [5, 7]\noutput_format = \"csv\"\n").unwrap();
    let out = run_in(
        dir.path(),
        &["verify", "--theorem", "main1", "--config", config.to_str().unwrap()],
    );
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let csv = stdout_of(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("family,t,p,lambda,m,j,n,pass,value"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().all(|r| r.starts_with("F,,")));
    assert!(rows.iter().any(|r| r.starts_with("F,,5,")));
    assert!(rows.iter().any(|r| r.starts_with("F,,7,")));

    // A flag wins over the file: json output again.
    let out = run_in(
        dir.path(),
        &[
            "verify", "--theorem", "main1", "--config", config.to_str().unwrap(), "--format",
            "json",
        ],
    );
    assert!(stdout_of(&out).starts_with('{'));

    let unknown = dir.path().join("bad.toml");
    std::fs::write(&unknown, "bogus = 3\n").unwrap();
    let out = run_in(
        dir.path(),
        &["verify", "--theorem", "main1", "--config", unknown.to_str().unwrap()],
    );
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("bogus"));
}

#[test]
fn cache_dir_resolution_prefers_the_flag_over_the_environment() {
    let env_dir = TempDir::new().unwrap();
    let flag_dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_strange-lab"))
        .args([
            "expand", "--family", "F", "--r", "1", "--order", "4", "--cache-dir",
            flag_dir.path().to_str().unwrap(),
        ])
        .env("STRANGE_LAB_CACHE", env_dir.path())
        .output()
        .unwrap();
    assert_eq!(code_of(&out), 0, "{}", stderr_of(&out));
    let flagged = std::fs::read_dir(flag_dir.path()).unwrap().count();
    let enved = std::fs::read_dir(env_dir.path()).unwrap().count();
    assert_eq!(flagged, 1, "entry lands in the flagged directory");
    assert_eq!(enved, 0, "environment directory stays untouched");
}

#[test]
fn thread_hint_is_accepted_and_zero_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &["sets", "--p", "5", "--r", "1", "--s", "0", "--threads", "4"],
    );
    assert_eq!(code_of(&out), 0);

    let out = run_in(
        dir.path(),
        &["sets", "--p", "5", "--r", "1", "--s", "0", "--threads", "0"],
    );
    assert_eq!(code_of(&out), 2);
}
