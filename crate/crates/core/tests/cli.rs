use std::process::{Command, Output};

use serde_json::Value;

fn qdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdc")).args(args).env_remove("QDC_CONVENTION").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reduce_xi_squared() {
    let o = qdc(&["reduce", "--n", "2", "--presentation", "swz", "XiX*XiX"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn reduce_defining_relation() {
    let rel = "T[1,1]*T[1,2] - p^2*T[1,2]*T[1,1]";
    let o = qdc(&["reduce", "--n", "2", "--presentation", "frt_T", rel]);
    assert_eq!(stdout(&o).trim(), "0");
    let o = qdc(&["reduce", "--n", "2", "--presentation", "lbasis", "--seed", "7", "TrOmL*TrOmL"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qdc(&["check", "--n", "2", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(qdc(&["reduce", "--n", "2", "--presentation", "swz", "T[1,"]).status.code(), Some(2));
    assert_eq!(qdc(&["dump", "--n", "2", "--rules"]).status.code(), Some(2));
    assert_eq!(qdc(&["check", "--n", "2", "--convention", "sideways"]).status.code(), Some(2));
}

#[test]
fn convention_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qdc"))
        .args(["dump", "--rmatrix", "--n", "2"])
        .env("QDC_CONVENTION", "inverse")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["convention"], "inverse");
}

#[test]
fn rmatrix_dump_lists_nonzero_entries() {
    let v: Value = serde_json::from_slice(&qdc(&["dump", "--rmatrix", "--n", "2"]).stdout).unwrap();
    assert_eq!(v["N"], 2);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 5);
    assert!(entries.contains(&serde_json::json!([1, 2, 1, 2, "(p^4 - 1)/p^2"])));
}

#[test]
fn dumps_are_byte_identical() {
    for args in [
        &["dump", "--rmatrix", "--n", "3"][..],
        &["dump", "--presentation", "fp", "--n", "2"],
        &["dump", "--rules", "--presentation", "lbasis", "--n", "2"],
    ] {
        assert_eq!(qdc(args).stdout, qdc(args).stdout, "{args:?}");
    }
}

#[test]
fn fp_dump_notes_trace_elimination() {
    let v: Value = serde_json::from_slice(&qdc(&["dump", "--presentation", "fp", "--n", "2"]).stdout).unwrap();
    assert_eq!(v["eliminated"][0]["generator"], "OmT[2,2]");
    let gens: Vec<&str> = v["generators"].as_array().unwrap().iter().map(|g| g.as_str().unwrap()).collect();
    assert!(!gens.contains(&"OmT[2,2]") && gens.contains(&"OmT[1,1]"));
}

#[test]
fn rules_dump_carries_sources() {
    let v: Value =
        serde_json::from_slice(&qdc(&["dump", "--rules", "--presentation", "lbasis", "--n", "2"]).stdout).unwrap();
    let rules = v.as_array().unwrap();
    assert_eq!(rules.len(), 128);
    assert!(rules.iter().any(|r| r["source"] == "eq-ss3"));
    assert!(rules.iter().all(|r| r["lhs"].is_string() && r["rhs"].is_string()));
}

#[test]
fn fp_embed_suite_routing() {
    let o = qdc(&["check", "--n", "2", "--suite", "fp-embed", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["helper_identities", "fp_embedding", "omegaL_basis_change"]);
    assert_eq!(v["schema"], "qdc-report/1");
}

#[test]
fn budget_exhaustion_exits_three() {
    let o = qdc(&["check", "--n", "9", "--suite", "lbasis", "--budget", "1s", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "skip");
        assert_eq!(c["reason"], "budget exceeded");
    }
}

#[test]
fn mutation_fails_with_exit_one() {
    let o = qdc(&["check", "--n", "2", "--suite", "matrix", "--mutation", "qtrace-weights", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mutation"], "qtrace-weights");
    let failed: Vec<&Value> = v["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
    assert!(!failed.is_empty() && failed.iter().all(|c| c["witness"].is_string()));
}

#[test]
fn text_report_and_timings() {
    let o = qdc(&["check", "--n", "3", "--suite", "matrix", "--timings"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("suite matrix N=3 convention standard"));
    assert!(text.contains("detq_central") && text.contains(" ms"));
    assert!(text.trim_end().ends_with("PASS"));
}
