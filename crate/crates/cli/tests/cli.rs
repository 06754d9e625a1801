use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn enricat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enricat")).args(args).env_remove("ENRICAT_BOUND").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn outcome(o: &Output) -> String {
    report(o)["payload"]["outcome"].as_str().unwrap().to_string()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_shipped_fixture() {
    let o = enricat(&["validate", path(&fixture("gset_counterexample_z2_n2.json"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["payload"]["result"]["objects"], 3);
}

#[test]
fn fixture_matches_the_builder() {
    let c = enricat::scenarios::build_gset_counterexample(&enricat::base::Group::cyclic(2), 2, false).unwrap();
    let doc = enricat::io::Document::new(enricat::io::Kind::Vcategory, &c);
    let shipped = std::fs::read_to_string(fixture("gset_counterexample_z2_n2.json")).unwrap();
    assert_eq!(doc.to_text(), shipped);
}

#[test]
fn check_flat_on_representable_exits_zero() {
    let o = enricat(&["check-flat", path(&fixture("finset_representable.json"))]);
    assert_eq!(code(&o), 0);
    assert_eq!(outcome(&o), "yes");
    let r = &report(&o)["payload"]["result"];
    for key in ["outcome", "criteria", "certificate", "bound"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn no_verdicts_exit_one_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [
        ("check-flat", "finset_terminal_discrete2.json"),
        ("oracle", "finset_terminal_discrete2.json"),
        ("check-cauchy-weight", "finset_terminal_discrete2.json"),
        ("check-flat", "fincat_clause_two_defect.json"),
        ("check-filtered", "finset_terminal_discrete2.json"),
    ] {
        let o = enricat(&[cmd, path(&fixture(file))]);
        assert_eq!(code(&o), 1, "{cmd} {file}");
        let saved = dir.path().join(format!("{cmd}-{file}"));
        std::fs::write(&saved, &o.stdout).unwrap();
        let r = enricat(&["--replay", path(&saved)]);
        assert_eq!(code(&r), 0, "{cmd} {file}: {}", String::from_utf8_lossy(&r.stdout));
        let rep = &report(&r)["payload"];
        assert_eq!(rep["recorded"], "no");
        assert_eq!(rep["replayed"], "no");
    }
}

#[test]
fn clause_two_defect_certificate_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let o = enricat(&["check-flat", path(&fixture("fincat_clause_two_defect.json"))]);
    let r = report(&o);
    let crit = r["payload"]["result"]["criteria"].as_array().unwrap();
    let double = crit.iter().find(|c| c["decisive"] == true).unwrap();
    assert_eq!(double["outcome"], "no");
    assert!(
        double["certificate"].get("no_cell_for_vertical").is_some()
            || double["certificate"].to_string().contains("vertical")
    );
    let saved = dir.path().join("r.json");
    std::fs::write(&saved, &o.stdout).unwrap();
    let rep = report(&enricat(&["--replay", path(&saved)]));
    assert_eq!(rep["payload"]["certificate_checked"], true);
}

#[test]
fn unknown_exits_two_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let o = enricat(&["check-cauchy-weight", "--bound", "1", path(&fixture("additive_sum_f2.json"))]);
    assert_eq!(code(&o), 2);
    assert_eq!(outcome(&o), "unknown");
    let saved = dir.path().join("u.json");
    std::fs::write(&saved, &o.stdout).unwrap();
    let r = enricat(&["--replay", path(&saved)]);
    assert_eq!(code(&r), 0);
    assert_eq!(report(&r)["payload"]["replayed"], "unknown");
}

#[test]
fn tampered_report_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let o = enricat(&["check-flat", path(&fixture("finset_terminal_discrete2.json"))]);
    let mut v = report(&o);
    v["payload"]["outcome"] = Value::from("yes");
    let saved = dir.path().join("t.json");
    std::fs::write(&saved, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&enricat(&["--replay", path(&saved)])), 1);
}

#[test]
fn filtered_and_final_checks() {
    assert_eq!(code(&enricat(&["check-filtered", path(&fixture("chain3.json"))])), 0);
    assert_eq!(code(&enricat(&["check-final", path(&fixture("split_pair_inclusion.json"))])), 0);
}

#[test]
fn scenario_run_reports_six_stages() {
    let o = enricat(&["scenario", "run", "gset-counterexample", "--group", "z2", "--n", "3"]);
    assert_eq!(code(&o), 0);
    let stages = report(&o)["payload"]["result"]["stages"].as_array().unwrap().clone();
    let decisive: Vec<_> = stages.iter().filter(|s| !s["expected"].is_null()).collect();
    assert_eq!(decisive.len(), 6);
    assert!(decisive.iter().all(|s| s["outcome"] == "yes"));
    let literal = enricat(&["scenario", "run", "gset-counterexample", "--literal"]);
    assert_eq!(code(&literal), 1);
    assert_eq!(code(&enricat(&["scenario", "run", "split-pair"])), 0);
    assert_eq!(code(&enricat(&["scenario", "run", "additive-example", "--p", "3"])), 0);
    assert_eq!(code(&enricat(&["scenario", "run", "no-such-scenario"])), 3);
    let list = enricat(&["scenario", "list"]);
    assert_eq!(report(&list).as_array().unwrap().len(), 3);
}

#[test]
fn constructions_succeed() {
    let rep = path(&fixture("finset_representable.json")).to_string();
    let corep = path(&fixture("finset_corepresentable.json")).to_string();
    let o = enricat(&["colimit", &rep, &corep]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // C(-, 1) ∗ C(0, -) ≅ C(0, 1), a single arrow.
    assert_eq!(report(&o)["payload"]["result"]["value"], serde_json::json!({"type": "set", "size": 1}));
    assert_eq!(code(&enricat(&["elements", &rep])), 0);
    assert_eq!(code(&enricat(&["double-elements", path(&fixture("fincat_clause_two_defect.json"))])), 0);
    assert_eq!(code(&enricat(&["cauchy-complete", path(&fixture("gset_counterexample_z2_n2.json"))])), 0);
}

#[test]
fn input_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"version\": \"1\", \"kind\": ").unwrap();
    let o = enricat(&["validate", path(&bad)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    assert_eq!(code(&enricat(&["validate", "/nonexistent/file.json"])), 3);
    assert_eq!(code(&enricat(&["frobnicate"])), 3);
    assert_eq!(code(&enricat(&[])), 3);
    // A category document where a weight is expected.
    assert_eq!(code(&enricat(&["check-flat", path(&fixture("chain3.json"))])), 3);
}

#[test]
fn bound_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_enricat"))
        .args(["oracle", path(&fixture("finset_representable.json"))])
        .env("ENRICAT_BOUND", "2")
        .output()
        .unwrap();
    assert_eq!(report(&o)["payload"]["options"]["bound"], 2);
    let o = enricat(&["oracle", "--bound", "4", path(&fixture("finset_representable.json"))]);
    assert_eq!(report(&o)["payload"]["options"]["bound"], 4);
}

#[test]
fn oracle_and_decider_agree_on_fixtures() {
    for f in [
        "finset_representable.json",
        "finset_terminal_discrete2.json",
        "gset_terminal_weight_z2_n2.json",
        "additive_sum_f2.json",
        "fincat_clause_two_defect.json",
    ] {
        let a = outcome(&enricat(&["check-flat", path(&fixture(f))]));
        let b = outcome(&enricat(&["oracle", "--bound", "3", path(&fixture(f))]));
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn corpus_output_is_deterministic() {
    let a = enricat(&["corpus", "--seed", "5", "--count", "24"]);
    let b = enricat(&["corpus", "--seed", "5", "--count", "24"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = enricat(&["corpus", "--seed", "6", "--count", "24"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn text_format_is_readable() {
    let o = enricat(&["--format", "text", "check-flat", path(&fixture("finset_representable.json"))]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("check-flat: yes"), "{s}");
    assert!(s.contains("(decisive)"));
}
