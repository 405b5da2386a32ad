mod common;

use std::process::Command;

use common::fixture;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("icbound").chain(args.iter().copied());
    let code = icbound::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn fano_minrank_and_distribution() {
    let v = json(&["minrank", &path("fano.json"), "--distribution"]);
    assert_eq!(v["value"], 4);
    let dist = v["distribution"].as_object().unwrap();
    assert_eq!(dist["4"], 1);
    let total: u64 = dist.values().map(|c| c.as_u64().unwrap()).sum();
    // one fitting matrix per assignment of the 14 free entries
    assert_eq!(total, 1 << 14);
}

#[test]
fn empty_side_information_needs_every_message() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "empty.json", r#"{"type":"icsi","n":3,"m":3,"t":1,"f":[1,2,3],"side_info":[[],[],[]]}"#);
    assert_eq!(json(&["minrank", &p])["value"], 3);
    assert_eq!(json(&["kappa", &p])["value"], 3);
}

#[test]
fn four_receiver_bounds() {
    let v = json(&["bounds", &path("four_receivers.json"), "--params", "phi_p,phi_p_f"]);
    assert_eq!(v["phi_p"], "3");
    assert_eq!(v["phi_p_f"], "5/2");
    assert_eq!(v.as_object().unwrap().len(), 2);
}

#[test]
fn certificates_are_attached_on_request() {
    let v = json(&["bounds", &path("four_receivers.json"), "--params", "phi_p_f", "--certificates"]);
    let groups = v["certificates"]["phi_p_f"]["groups"].as_array().unwrap();
    assert!(!groups.is_empty());
}

#[test]
fn table_output_lists_every_parameter() {
    let (code, out, _) = run(&["--format", "table", "bounds", &path("coded_triple.json")]);
    assert_eq!(code, 0);
    let row = |name: &str| {
        out.lines().find(|l| l.split_whitespace().next() == Some(name)).map(|l| l.split_whitespace().nth(1).unwrap().to_string())
    };
    assert_eq!(row("phi_p").as_deref(), Some("2"));
    assert_eq!(row("phi_p_l").as_deref(), Some("3"));
    assert_eq!(row("phi_p_f").as_deref(), Some("2"));
    assert!(out.starts_with("parameter"));
}

#[test]
fn unknown_parameter_is_a_usage_error() {
    let (code, _, err) = run(&["bounds", &path("fano.json"), "--params", "nope"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn missing_file_and_bad_args_exit_2() {
    assert_eq!(run(&["minrank", "/definitely/not/here.json"]).0, 2);
    assert_eq!(run(&["minrank"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("minrank"));
}

#[test]
fn exhausted_budget_exits_1() {
    let (code, out, err) = run(&["minrank", &path("fano.json"), "--budget", "1"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("budget"));
}

#[test]
fn output_is_deterministic_without_timing() {
    let args = ["simulate", &path("four_receivers.json"), "--scheme", "multicast", "--fractional", "--trials", "20", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.1).unwrap();
    assert!(v.get("elapsed").is_none());
    let timed = json(&["--timing", "bounds", &path("fano.json"), "--params", "phi"]);
    assert!(timed.get("elapsed").is_some());
}

#[test]
fn every_scheme_simulates_cleanly() {
    for (scheme, rate) in [("clique", "3"), ("local", "2"), ("multicast", "3"), ("partitioned-local", "2"), ("kappa", "2")] {
        let v = json(&["simulate", &path("four_receivers.json"), "--scheme", scheme, "--trials", "10"]);
        assert_eq!(v["failures"], 0, "{scheme}");
        assert_eq!(v["rate"], rate, "{scheme}");
        assert_eq!(v["trials"], 10);
    }
    let v = json(&["simulate", &path("four_receivers.json"), "--scheme", "multicast", "--fractional", "--trials", "10"]);
    assert_eq!(v["rate"], "5/2");
    assert_eq!(v["failures"], 0);
}

#[test]
fn gf4_local_scheme() {
    let v = json(&["simulate", &path("gf4_six.json"), "--scheme", "local", "--trials", "10"]);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["base_field"], 4);
}

#[test]
fn design_commands() {
    let v = json(&["design", "--plane", "2", "--p", "2"]);
    assert_eq!(v["v"], 7);
    assert_eq!(v["p_rank"], 4);
    assert_eq!(v["klemm"]["passes"], true);

    let d = json(&["design", &path("fano_design.json"), "--p", "2"]);
    assert_eq!(d["v"], 7);
    assert_eq!(d["lambda"], 1);

    let b = json(&["design-bound", &path("fano.json"), &path("fano_design.json"), "--p", "2"]);
    assert_eq!(b["bound"], "4");
    assert_eq!(b["valid"], true);

    let s = json(&["secrecy", &path("fano.json"), "--p", "2"]);
    assert_eq!(s["passes"], true);
    assert_eq!(s["leaks"].as_array().unwrap().len(), 0);

    let a = json(&["adversary", "--plane", "2", "--p", "2", "--messages", "1,2"]);
    assert_eq!(a["messages"], serde_json::json!([1, 2]));
    assert!(a.get("hypotheses_hold").is_some());
}

#[test]
fn reduce_digraphs() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = write_temp(&dir, "cycle.json", r#"{"n":3,"arcs":[[1,2],[2,3],[3,1]]}"#);
    let v = json(&["reduce", &cycle]);
    assert_eq!(v["minrank_is_n_minus_1"], true);
    assert_eq!(v["rank"], 2);

    let complete = write_temp(&dir, "k3.json", r#"{"n":3,"arcs":[[1,2],[2,1],[2,3],[3,2],[1,3],[3,1]]}"#);
    let v = json(&["reduce", &complete]);
    assert_eq!(v["minrank_is_n_minus_1"], false);

    let zero_based = write_temp(&dir, "bad.json", r#"{"n":3,"arcs":[[0,1]]}"#);
    assert_eq!(run(&["reduce", &zero_based]).0, 2);

    assert_eq!(json(&["reduce", &path("fano.json")])["n"], 7);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_icbound");
    let ok = Command::new(bin).args(["kappa", &path("coded_pair.json")]).output().unwrap();
    assert!(ok.status.success());
    let v: Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert!(v["value"].is_u64());

    let usage = Command::new(bin).args(["kappa"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));

    let budget = Command::new(bin).args(["minrank", &path("fano.json"), "--budget", "1"]).output().unwrap();
    assert_eq!(budget.status.code(), Some(1));
}
