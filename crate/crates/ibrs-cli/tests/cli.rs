//! End-to-end runs of the binary: every acceptance-relevant command goes
//! through `dispatch` with real files and real process exits.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ibrs"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ibrs-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture_file(fixture: &str, name: &str) -> PathBuf {
    let path = tmp(name);
    let out = bin()
        .args(["fixtures", "--name", fixture, "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "fixtures {fixture}: {out:?}");
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn result_of(out: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_str(&stdout(out)).expect("JSON report");
    assert_eq!(v["tool"], "ibrs");
    assert!(v["version"].is_string());
    v["result"].clone()
}

#[test]
fn fixtures_emit_the_labeled_example() {
    let out = bin().args(["fixtures", "--name", "paper-ibrs"]).output().unwrap();
    assert!(out.status.success());
    let v = result_of(&out);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 5);
    assert_eq!(v["arrows"].as_array().unwrap().len(), 6);
}

#[test]
fn mu_on_need_smooth() {
    let f = fixture_file("need-smooth", "need-smooth.json");
    let out = bin()
        .args(["mu", "--structure", f.to_str().unwrap(), "--set", "a,c"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(result_of(&out)["mu"], serde_json::json!(["a", "c"]));

    let out = bin()
        .args(["--pretty", "mu", "--structure", f.to_str().unwrap(), "--set", "a,b,c"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out).trim(), "a");
}

#[test]
fn valid_arrows_on_level3_solution() {
    let f = fixture_file("level3-solution", "l3.json");
    let out = bin()
        .args([
            "--pretty",
            "valid",
            "--structure",
            f.to_str().unwrap(),
            "--kind",
            "xy",
            "--x",
            "x,y,yp",
            "--y",
            "x,y,yp",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "a3,b1,b2,g1,g2");
}

#[test]
fn smooth_verdicts_and_exit_codes() {
    let f = fixture_file("total-vs-essential", "tve.json");
    let ok = bin()
        .args([
            "smooth", "--structure", f.to_str().unwrap(), "--mode", "essential", "--set", "a,b,c",
        ])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert_eq!(result_of(&ok)["holds"], serde_json::json!(true));

    let fail = bin()
        .args([
            "smooth", "--structure", f.to_str().unwrap(), "--mode", "total", "--set", "a,b,c",
        ])
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(1), "failed verdicts exit 1");

    let sub = bin()
        .args([
            "smooth", "--structure", f.to_str().unwrap(), "--mode", "sub", "--set", "a,c",
            "--set2", "a,b,c",
        ])
        .output()
        .unwrap();
    assert!(sub.status.success());
}

#[test]
fn represent_round_trips_through_files() {
    let t = fixture_file("level-bigger-2", "lb2.json");
    let s_path = tmp("lb2-structure.json");
    let out = bin()
        .args([
            "represent", "--table", t.to_str().unwrap(), "--mode", "level3", "--out",
            s_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());

    // μ(Y) = {y,y'} through the emitted file
    let out = bin()
        .args(["--pretty", "mu", "--structure", s_path.to_str().unwrap(), "--set", "x,y,yp"])
        .output()
        .unwrap();
    assert_eq!(stdout(&out).trim(), "y,yp");
}

#[test]
fn search_reports_exhausted_on_the_counterexample_table() {
    let t = fixture_file("level-bigger-2", "lb2s.json");
    let out = bin()
        .args([
            "search-l2ts", "--table", t.to_str().unwrap(), "--max-copies", "2",
            "--max-arrow-copies", "1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = result_of(&out);
    assert_eq!(v["outcome"], serde_json::json!("exhausted"));
    assert!(v["visited"].as_u64().unwrap() > 0);
}

#[test]
fn props_report_failures_with_exit_one() {
    let t = fixture_file("need-pr", "need-pr.json");
    let all = bin().args(["props", "--table", t.to_str().unwrap()]).output().unwrap();
    assert_eq!(all.status.code(), Some(1), "(μPR) fails on this table");

    let one = bin()
        .args(["props", "--table", t.to_str().unwrap(), "--property", "muCUM"])
        .output()
        .unwrap();
    assert!(one.status.success());
    let v = result_of(&one);
    assert_eq!(v["verdicts"][0]["holds"], serde_json::json!(true));
}

#[test]
fn verify_row_four_returns_the_counterexample() {
    let out = bin()
        .args(["verify-row", "--row", "4", "--size", "2", "--mode", "exhaustive"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = result_of(&out);
    assert_eq!(v["holds"], serde_json::json!(true));
    assert!(v["counterexample"]["mu"]["a,b"].is_array());
}

#[test]
fn logic_and_rules_over_a_valuation_structure() {
    // a one-atom structure preferring the ¬p valuation
    let structure = serde_json::json!({
        "carrier": ["0", "1"],
        "copies": [["0", 0], ["1", 0]],
        "arrows": [{
            "id": "al", "base": "al", "copy": 0,
            "origin": ["0", 0],
            "target": { "point": ["1", 0] }
        }],
        "level_bound": 1
    });
    let path = tmp("pref.json");
    std::fs::write(&path, serde_json::to_string_pretty(&structure).unwrap()).unwrap();

    let out = bin()
        .args([
            "logic", "--structure", path.to_str().unwrap(), "--lang", "p", "--theory", "",
            "--query", "!p",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(result_of(&out)["query_entailed"], serde_json::json!(true));

    let rules = bin()
        .args(["rules", "--structure", path.to_str().unwrap(), "--lang", "p"])
        .output()
        .unwrap();
    assert!(rules.status.success(), "a smooth one-arrow structure satisfies every listed rule");
}

#[test]
fn interp_algorithms_on_the_fixture() {
    let arg = bin()
        .args(["interp", "--fixture", "paper", "--alg", "arg"])
        .output()
        .unwrap();
    assert!(arg.status.success());
    assert_eq!(result_of(&arg)["winning"], serde_json::json!(["a", "c", "d"]));

    let modal = bin()
        .args(["interp", "--fixture", "paper", "--alg", "modal", "--world", "a", "--atom", "q"])
        .output()
        .unwrap();
    assert_eq!(result_of(&modal)["holds"], serde_json::json!(false));

    let nm = bin()
        .args([
            "interp", "--fixture", "paper", "--alg", "nm", "--premise", "p", "--conclusion", "q",
        ])
        .output()
        .unwrap();
    assert_eq!(result_of(&nm)["holds"], serde_json::json!(false));

    let int = bin()
        .args([
            "interp", "--fixture", "paper", "--alg", "int", "--premise", "p", "--conclusion", "q",
        ])
        .output()
        .unwrap();
    let v = result_of(&int);
    assert_eq!(v["holds"], serde_json::json!(false));
    assert_eq!(v["rho0"].as_array().unwrap().len(), 8);

    // counterfactual with caller-supplied distances
    let d = tmp("dist.json");
    std::fs::write(
        &d,
        r#"{"a,a":0,"a,b":9,"a,c":9,"a,d":2,"a,e":9}"#,
    )
    .unwrap();
    let cf = bin()
        .args([
            "interp", "--fixture", "paper", "--alg", "cf", "--world", "a", "--premise", "p",
            "--conclusion", "q", "--radius", "2", "--distances", d.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(result_of(&cf)["holds"], serde_json::json!(false));
}

#[test]
fn circuit_table_matches_the_transition_rows() {
    let c1 = fixture_file("circuit1", "c1.json");
    let out = bin()
        .args([
            "--pretty", "circuit", "--netlist", c1.to_str().unwrap(), "--horizon", "9", "--table",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("In1"));
    assert!(text.contains("Out2"));
    // row 5, start of the oscillation
    assert!(text.lines().any(|l| l.trim_start().starts_with("5:")
        && l.contains("T    F    F    F    T    F    F    F")));

    let c2 = fixture_file("circuit2", "c2.json");
    let json_run = bin()
        .args(["circuit", "--netlist", c2.to_str().unwrap()])
        .output()
        .unwrap();
    let v = result_of(&json_run);
    assert_eq!(v["classification"]["kind"], serde_json::json!("stable"));
    assert_eq!(v["classification"]["first_time"], serde_json::json!(6));
}

#[test]
fn circuit_diagram_consequence() {
    let c2 = fixture_file("circuit2", "c2b.json");
    let holds = bin()
        .args([
            "circuit", "--netlist", c2.to_str().unwrap(), "--horizon", "64", "--alpha",
            "In1=T,In2=F", "--beta", "Out2=T",
        ])
        .output()
        .unwrap();
    assert!(holds.status.success());
    assert_eq!(result_of(&holds)["diagram_consequence"], serde_json::json!(true));

    let c1 = fixture_file("circuit1", "c1b.json");
    let fails = bin()
        .args([
            "circuit", "--netlist", c1.to_str().unwrap(), "--horizon", "64", "--alpha",
            "In1=T,In2=F", "--beta", "Out1=F",
        ])
        .output()
        .unwrap();
    assert_eq!(fails.status.code(), Some(1));
    assert_eq!(result_of(&fails)["diagram_consequence"], serde_json::json!(false));
}

#[test]
fn input_errors_exit_two() {
    let out = bin()
        .args(["mu", "--structure", "/nonexistent.json", "--set", "a"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["fixtures", "--name", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_embed_version_hashes_and_defaults() {
    let t = fixture_file("need-pr", "np-report.json");
    let out = bin()
        .args(["props", "--table", t.to_str().unwrap(), "--property", "muCUM"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let sha = v["inputs"]["table"]["sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);
    let c = fixture_file("circuit1", "c1r.json");
    let out = bin().args(["circuit", "--netlist", c.to_str().unwrap()]).output().unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // 2^8 points + max delay 1
    assert_eq!(v["defaults"]["horizon"], serde_json::json!(257));
}
