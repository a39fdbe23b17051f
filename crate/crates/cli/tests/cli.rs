//! End-to-end tests against the built binary: pinned outputs, exit codes,
//! format variants, and the classify -> equiv round trip.

use std::io::BufReader;
use std::process::{Command, Output};

use serde_json::Value;

fn permbin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permbin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = permbin(args);
    assert!(
        out.status.success(),
        "exit {:?} for {args:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("single JSON object on stdout")
}

#[test]
fn nd_pins_the_orbit_minima_of_f16() {
    let v = json_out(&["nd", "--p", "2", "--m", "4", "--d", "3"]);
    assert_eq!(v["N_d"], serde_json::json!([1, 2, 3, 4, 6, 12]));
    assert_eq!(v["q"], 16);
    assert_eq!(v["flags"]["d"], "3");
}

#[test]
fn test_pb_agrees_across_methods_on_the_f16_example() {
    let v = json_out(&[
        "test-pb", "--q", "4", "--e", "2", "--n", "13", "--d", "3", "--a-log", "5", "--method",
        "both",
    ]);
    assert_eq!(v["brute"], true);
    assert_eq!(v["mu"], true);
    assert_eq!(v["is_pb"], true);
    assert_eq!(v["criterion_complete"], true);
    assert_eq!(v["flags"]["method"], "both");
}

#[test]
fn verify_r16_at_q3_reports_no_mismatches() {
    let v = json_out(&["verify", "--result", "r1.6", "--q", "3"]);
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
    assert_eq!(v["points"].as_u64().unwrap(), 48);
}

#[test]
fn coefficient_forms_agree() {
    // xi^5 over F_16 with xi a root of X^4 + X + 1: xi^5 = xi^2 + xi.
    let by_log = json_out(&[
        "test-pb", "--q", "4", "--n", "13", "--d", "3", "--a-log", "5",
    ]);
    let by_vec = json_out(&[
        "test-pb", "--q", "4", "--n", "13", "--d", "3", "--a-vec", "0,1,1,0",
    ]);
    assert_eq!(by_log["is_pb"], by_vec["is_pb"]);
    assert_eq!(by_vec["flags"]["a-vec"], "0,1,1,0");
    // The zero coefficient degenerates the family: a domain error, not a crash.
    let out = permbin(&["test-pb", "--q", "4", "--n", "13", "--d", "3", "--a-zero"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes_separate_usage_domain_and_capacity() {
    assert_eq!(permbin(&["--help"]).status.code(), Some(0));
    assert_eq!(permbin(&["nd", "--p", "2", "--m", "4", "--d", "3", "--bogus"]).status.code(), Some(1));
    assert_eq!(permbin(&["definitely-not-a-command"]).status.code(), Some(1));

    let domain = permbin(&["field-info", "--p", "6", "--m", "1"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("not prime"));

    let nondiv = permbin(&["nd", "--p", "2", "--m", "4", "--d", "7"]);
    assert_eq!(nondiv.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&nondiv.stderr).contains("does not divide"));

    let capacity = permbin(&["classify", "--q", "128"]);
    assert_eq!(capacity.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capacity.stderr).contains("cap"));
}

#[test]
fn text_and_csv_formats_carry_the_same_facts() {
    let text = permbin(&["nd", "--p", "2", "--m", "4", "--d", "3", "--format", "text"]);
    let text = String::from_utf8(text.stdout).unwrap();
    assert!(text.contains("command: nd"));
    assert!(text.contains("N_d: 1 2 3 4 6 12"));
    assert!(text.ends_with('\n'));

    let csv = permbin(&["nd", "--p", "2", "--m", "4", "--d", "3", "--format", "csv"]);
    let csv = String::from_utf8(csv.stdout).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.contains("flag.d,3"));
    assert!(csv.contains("N_d,1 2 3 4 6 12"));
}

#[test]
fn out_flag_writes_the_file_and_keeps_stdout_quiet() {
    let dir = std::env::temp_dir().join("permbin-cli-out-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("nd.json");
    let out = permbin(&[
        "nd", "--p", "2", "--m", "4", "--d", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["N_d"], serde_json::json!([1, 2, 3, 4, 6, 12]));
}

#[test]
fn scan_output_is_identical_across_worker_counts() {
    let w1 = permbin(&[
        "scan", "--family", "t19", "--q", "4,8", "--n-from", "1", "--n-to", "20", "--workers", "1",
    ]);
    let w4 = permbin(&[
        "scan", "--family", "t19", "--q", "4,8", "--n-from", "1", "--n-to", "20", "--workers", "4",
    ]);
    assert!(w1.status.success() && w4.status.success());
    let mut a = permbin::results::read_jsonl(BufReader::new(&w1.stdout[..])).unwrap();
    let mut b = permbin::results::read_jsonl(BufReader::new(&w4.stdout[..])).unwrap();
    permbin::results::strip_timing(&mut a);
    permbin::results::strip_timing(&mut b);
    assert_eq!(a, b);
}

#[test]
fn scan_flag_validation_names_the_offender() {
    let t19 = permbin(&[
        "scan", "--family", "t19", "--q", "4", "--n-from", "1", "--n-to", "2", "--d-from", "1",
        "--d-to", "2",
    ]);
    assert_eq!(t19.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&t19.stderr).contains("t110"));

    let t110 = permbin(&["scan", "--family", "t110", "--q", "5", "--n-from", "1", "--n-to", "2"]);
    assert_eq!(t110.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&t110.stderr).contains("--d-from"));
}

#[test]
fn classify_stream_round_trips_through_equiv() {
    let dir = std::env::temp_dir().join("permbin-cli-roundtrip-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("classes13.jsonl");
    let out = permbin(&["classify", "--q", "13", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());

    let v = json_out(&["equiv", "--from-file", path.to_str().unwrap()]);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["members"].as_u64().unwrap(), 96);

    // The stream is also parseable line by line as plain JSON.
    let text = std::fs::read_to_string(&path).unwrap();
    for line in text.lines() {
        let _: Value = serde_json::from_str(line).unwrap();
    }
}

#[test]
fn equiv_oracle_agrees_in_both_directions() {
    // Same class of F_7 (both reduce to d=3, n=1).
    let same = json_out(&[
        "equiv", "--q", "7", "--f-terms", "0:4,1:1", "--g-terms", "2:4,0:1", "--oracle",
    ]);
    assert_eq!(same["equivalent"], true);
    assert_eq!(same["oracle_equivalent"], true);
    assert!(same["witness"].is_object());

    // Different classes of F_9 (the d=2 and d=4 orbits cannot mix).
    let diff = json_out(&[
        "equiv", "--q", "9", "--f-terms", "0:3,1:1", "--g-terms", "0:5,6:1", "--oracle",
    ]);
    assert_eq!(diff["equivalent"], false);
    assert_eq!(diff["oracle_equivalent"], false);

    let neither = permbin(&["equiv", "--q", "7"]);
    assert_eq!(neither.status.code(), Some(1));
}

#[test]
fn canonical_emits_triple_witness_and_representative() {
    let v = json_out(&["canonical", "--q", "16", "--terms", "5:13,0:7"]);
    assert_eq!(v["triple"]["d"], 3);
    assert!(v["witness"]["u_log"].is_u64());
    assert!(v["representative"].as_array().unwrap().len() == 2);
    // Non-permutations are rejected by default and name the precondition.
    let bad = permbin(&["canonical", "--q", "16", "--terms", "0:13,5:3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("not a permutation"));
}

#[test]
fn curve_reports_numerator_and_diagnostics() {
    let v = json_out(&["curve", "--q", "8", "--n", "2", "--d", "3", "--a-log", "3", "--count-points"]);
    assert_eq!(v["diagnostics"]["delta"], 6);
    assert!(v["diagnostics"]["affine_count"].is_u64());
    let terms = v["numerator"]["terms"].as_array().unwrap();
    assert!(terms.iter().any(|t| t["i"] == 3 && t["j"] == 3));
}
