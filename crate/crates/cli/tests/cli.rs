use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn trialg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trialg"))
        .args(args)
        .current_dir(dir)
        .env_remove("TRISYS_EVAL_CAP")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn kp_reproduces_dialgebra_axioms() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("assoc.ids"), "{{a,b},c} = {a,{b,c}}\n").unwrap();
    let o = trialg(dir.path(), &["kp", "--arity", "2", "--input", "assoc.ids", "--golden", "catalog/dialgebra.ids"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("# deduplicated (5)"));
}

#[test]
fn kp_reproduces_first_kind_axioms() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("ats1.ids"), trialg::catalog::source("ATS1").unwrap()).unwrap();
    let o = trialg(dir.path(), &["kp", "--arity", "3", "--input", "ats1.ids", "--golden", "catalog/att1.ids"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn kp_golden_mismatch_exits_one() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("assoc.ids"), "{{a,b},c} = {a,{b,c}}\n").unwrap();
    let o = trialg(dir.path(), &["kp", "--arity", "2", "--input", "assoc.ids", "--golden", "LEFT_SYMMETRIC_DI"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn kp_malformed_input_exits_two_with_location() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.ids"), "{{a,b},c = {a,{b,c}}\n").unwrap();
    let o = trialg(dir.path(), &["kp", "--arity", "2", "--input", "bad.ids"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.ids:1:"));
}

#[test]
fn kp_arity_mismatch_exits_two() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("assoc.ids"), "{{a,b},c} = {a,{b,c}}\n").unwrap();
    assert_eq!(code(&trialg(dir.path(), &["kp", "--arity", "3", "--input", "assoc.ids"])), 2);
}

#[test]
fn check_commands_pass() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["check", "variety", "--set", "ATT2", "--model", "matrix", "--m", "2", "--m1", "1", "--p", "5"][..],
        &["check", "theorem", "--name", "asstojordan", "--model", "free", "--gens", "5", "--deg", "5"],
        &["check", "variety", "--set", "JTD", "--model", "zero"],
        &["check", "dialgebra", "--model", "differential"],
        &["check", "leibniz", "--model", "matrix", "--m", "3", "--m1", "2", "--p", "7"],
    ] {
        let o = trialg(dir.path(), args);
        assert_eq!(code(&o), 0, "{args:?}: {}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn check_reports_falsifier() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&trialg(d, &["export", "--p", "5", "--out", "m21.json"])), 0);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(d.join("m21.json")).unwrap()).unwrap();
    // e22 ⊣ e22 = e22 becomes 2·e22
    v["left"][3][3][3] = Value::from("2");
    fs::write(d.join("bent.json"), v.to_string()).unwrap();
    let o = trialg(d, &["check", "dialgebra", "--from", "bent.json"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn check_json_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["--format", "json", "check", "variety", "--set", "ATT1", "--p", "5", "--mode", "sampled", "--seed", "7"];
    let strip = |o: Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("elapsed");
        v
    };
    let a = strip(trialg(dir.path(), &args));
    assert_eq!(a["status"], "pass");
    assert_eq!(a, strip(trialg(dir.path(), &args)));
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    for args in [
        &["check", "variety", "--set", "ATT1", "--mode", "sampled"][..],
        &["check", "variety", "--set", "NOPE"],
        &["check", "variety", "--set", "ATT1", "--p", "4"],
        &["check", "variety", "--set", "ATT1", "--p", "2"],
        &["check", "variety", "--set", "ATT1", "--from", "missing.json"],
        &["check", "theorem", "--name", "nope"],
        &["check", "variety", "--set", "ATT1", "--model", "free", "--mode", "exhaustive", "--eval-cap", "10"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&trialg(dir.path(), args)), 2, "{args:?}");
    }
}

#[test]
fn eval_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_trialg"))
        .args(["check", "variety", "--set", "ATT1", "--p", "5", "--mode", "exhaustive"])
        .current_dir(dir.path())
        .env("TRISYS_EVAL_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn embed_first_kind_writes_passing_embedding() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&trialg(d, &["derive", "--p", "5", "--kind", "first", "--out", "m21.json"])), 0);
    assert_eq!(code(&trialg(d, &["embed", "--kind", "first", "--from", "m21.json"])), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(d.join("embedding.json")).unwrap()).unwrap();
    assert_eq!(v["type"], "embedding");
    assert_eq!(v["recovery"]["status"], "pass");
    assert_eq!(v["axioms"]["status"], "pass");
}

#[test]
fn embed_second_kind_of_block_matrices_is_a_falsifier() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&trialg(d, &["derive", "--p", "5", "--kind", "second", "--out", "m21_att2.json"])), 0);
    let o = trialg(d, &["embed", "--kind", "second", "--from", "m21_att2.json", "--out", "u2.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not well defined"));
}

#[test]
fn ann_and_complement() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    trialg(d, &["derive", "--p", "5", "--kind", "second", "--out", "m21_att2.json"]);
    let o = trialg(d, &["--format", "json", "ann", "--from", "m21_att2.json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 2);
    let o = trialg(d, &["ann", "--from", "m21_att2.json", "--complement", "e11", "--complement", "e22"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = trialg(d, &["ann", "--from", "m21_att2.json", "--complement", "e11"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn leibniz_subspace_constants() {
    let dir = TempDir::new().unwrap();
    let o = trialg(dir.path(), &["leibniz", "--m", "2", "--m1", "1", "--subspace", "B1,B2,B3"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("[B1,B3] = B1"), "{out}");
    assert!(out.contains("[B2,B3] = -B2"), "{out}");
    assert!(out.contains("[B3,B3] = B1"), "{out}");
}

#[test]
fn export_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    assert_eq!(code(&trialg(d, &["export", "--m", "3", "--m1", "1", "--p", "5", "--out", "m31.json"])), 0);
    assert_eq!(code(&trialg(d, &["check", "dialgebra", "--from", "m31.json"])), 0);
    assert_eq!(code(&trialg(d, &["check", "theorem", "--name", "att2leibniz", "--from", "m31.json"])), 0);
}

#[test]
fn derived_products_are_in_their_varieties() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    trialg(d, &["derive", "--p", "5", "--out", "t.json"]);
    assert_eq!(code(&trialg(d, &["check", "variety", "--set", "JTD", "--from", "t.json"])), 0);
    assert_eq!(code(&trialg(d, &["check", "variety", "--set", "LEIBTS", "--from", "t.json"])), 0);
    let o = trialg(d, &["derive", "--p", "5", "--products", "jtd"]);
    assert_eq!(code(&o), 0);
    assert!(serde_json::from_slice::<Value>(&o.stdout).is_ok());
}
