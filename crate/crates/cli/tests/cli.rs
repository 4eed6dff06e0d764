use std::process::{Command, Output};

use serde_json::Value;

fn ellwall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ellwall")).args(args).output().expect("ellwall runs")
}

fn json(args: &[&str]) -> Value {
    let out = ellwall(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn walls_json_counts_and_metadata() {
    let v = json(&["walls", "--type", "A-1", "--n", "4"]);
    assert_eq!(v["walls"].as_array().unwrap().len(), 6);
    assert_eq!(v["chambers"], 7);
    assert_eq!(v["conventions"]["product"], "dual");
    assert!(v["tool_version"].is_string());
}

#[test]
fn walls_svg_matches_golden() {
    let out = ellwall(&["walls", "--type", "A-1", "--n", "3", "--format", "svg"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), include_str!("golden/walls_a-1_n3.svg"));
}

#[test]
fn walls_csv_has_header_and_rows() {
    let out = ellwall(&["walls", "--type", "A-1", "--n", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ellwall(&["walls", "--type", "A1", "--n", "2"]).status.code(), Some(2));
    assert_eq!(ellwall(&["walls", "--type", "A-1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(ellwall(&["bracket", "--lhs", "1,0,pt", "--rhs", "0,1,E"]).status.code(), Some(2));
    assert_eq!(ellwall(&["bracket", "--lhs", "1,0,foo", "--rhs", "0,1,E"]).status.code(), Some(2));
}

#[test]
fn bracket_sigma_pair() {
    let v = json(&["bracket", "--lhs", "1,1,sigma+", "--rhs", "0,-2,sigma-", "--truncation", "5"]);
    assert_eq!(v["status"], "exact");
    assert_eq!(v["x"], "2");
    assert_eq!(v["rhs_params"][0]["label"], "E");
    assert_eq!(v["match"], true);
}

#[test]
fn bracket_slope_zero_central_values() {
    let v = json(&["bracket", "--lhs", "0,1,sigma+", "--rhs", "0,-1,sigma-", "--truncation", "5"]);
    assert_eq!(v["central"]["c_t"], "1");
    assert_eq!(v["central"]["matches_pairing_prediction"], true);
    // The E/pt pair comes out with the opposite sign to the pairing.
    let v = json(&["bracket", "--lhs", "0,1,E", "--rhs", "0,-1,pt", "--truncation", "5"]);
    assert_eq!(v["central"]["value"], "-1");
    assert_eq!(v["central"]["matches_pairing_prediction"], false);
}

#[test]
fn bracket_extended_mode() {
    let v = json(&["bracket", "--lhs", "0,1,E", "--rhs", "1,0,pt", "--truncation", "5", "--extended", "euler"]);
    assert_eq!(v["status"], "rescaled");
    assert!(v["conventions"]["extended_mode"].as_str().unwrap().starts_with("euler"));
}

#[test]
fn monodromy_f_is_an_involution() {
    let v = json(&["monodromy", "--generator", "f", "--modes", "2:E,1:pt,1:sigma+", "--times", "2"]);
    assert_eq!(v["equals_input"], true);
    let v = json(&["monodromy", "--generator", "f", "--modes", "2:E,1:pt"]);
    assert_eq!(v["output"]["terms"][0]["charge"], -3);
}

#[test]
fn monodromy_s_shifts_charge_by_mode_count() {
    let v = json(&["monodromy", "--generator", "s", "--charge", "2"]);
    assert_eq!(v["equals_input"], true);
    let v = json(&["monodromy", "--generator", "s", "--modes", "1:E,1:E"]);
    assert!(v["output"]["terms"].as_array().unwrap().iter().all(|t| t["charge"] == 2));
}

#[test]
fn local_splitting() {
    let v = json(&["local", "--k", "2", "--a", "0,1", "--n", "1"]);
    assert_eq!(v["trace"], "0");
    assert_eq!(v["splits"], true);
    let v = json(&["local", "--k", "2", "--a", "1,0", "--n", "1"]);
    assert_eq!(v["splits"], false);
}

#[test]
fn hh0_table() {
    let v = json(&["hh0"]);
    let s = v.to_string();
    for d in ["2", "6", "8", "9", "10"] {
        assert!(s.contains(d));
    }
}

#[test]
fn verify_all_exit_codes() {
    assert_eq!(ellwall(&["verify-all", "--only", "1,6"]).status.code(), Some(0));
    let out = ellwall(&["verify-all", "--only", "7"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["failed"], 1);
}
