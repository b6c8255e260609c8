use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dldef(args: &[&str]) -> (i32, Value) {
    let out: Output = Command::new(env!("CARGO_BIN_EXE_dldef"))
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exit code");
    let report = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    });
    (code, report)
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("dldef-cli-{}-{name}", std::process::id()))
}

#[test]
fn exit_code_matches_verdict() {
    let (code, r) = dldef(&[
        "definition-exists",
        "--onto",
        "fixture:o1",
        "--concept",
        "{a}",
        "--sigma",
        "C:A R:r",
        "--dialect",
        "alco",
    ]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"], false);
    assert_eq!(r["exit"], 1);
    let (code, r) = dldef(&[
        "implicit",
        "--onto",
        "fixture:o1",
        "--concept",
        "{a}",
        "--sigma",
        "C:A R:r",
        "--dialect",
        "alco",
    ]);
    assert_eq!((code, &r["verdict"]), (0, &Value::Bool(true)));
}

#[test]
fn interpolant_for_trivial_entailment() {
    let (code, r) = dldef(&[
        "interpolant-exists",
        "--c1",
        "A and B",
        "--c2",
        "A",
        "--dialect",
        "alco",
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["kind"], "interpolant");
    assert_eq!(r["signature"], "C:A");
}

#[test]
fn nonprojective_routes() {
    let (code, r) = dldef(&[
        "nonprojective-exists",
        "--onto",
        "fixture:beth",
        "--name",
        "A",
        "--dialect",
        "alcio",
    ]);
    assert_eq!(
        (code, r["details"]["route"].as_str()),
        (0, Some("implicit"))
    );
    let (code, r) = dldef(&[
        "nonprojective-exists",
        "--onto",
        "fixture:beth",
        "--name",
        "A",
        "--dialect",
        "alco",
    ]);
    assert_eq!(
        (code, r["details"]["route"].as_str()),
        (1, Some("reduction"))
    );
    assert_eq!(
        r["details"]["reduction"]["domains"],
        serde_json::json!(["D1", "D2"])
    );
    let (code, _) = dldef(&[
        "nonprojective-exists",
        "--onto",
        "fixture:beth",
        "--name",
        "A",
        "--dialect",
        "alco",
        "--route",
        "implicit",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn witness_round_trip() {
    let w = scratch("o1.json");
    let ws = w.to_str().unwrap();
    let (code, _) = dldef(&[
        "definition-exists",
        "--onto",
        "fixture:o1",
        "--concept",
        "{a}",
        "--sigma",
        "C:A R:r",
        "--dialect",
        "alco",
        "--witness",
        ws,
    ]);
    assert_eq!(code, 1);
    let (code, r) = dldef(&[
        "bisim",
        "--bundle",
        ws,
        "--o1",
        "fixture:o1",
        "--o2",
        "fixture:o1",
    ]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["details"]["relation_is_bisimulation"], true);
    assert_eq!(r["details"]["points_bisimilar"], true);
    let d1 = r["inputs"]["d1"].as_str().unwrap().to_string();
    let d2 = r["inputs"]["d2"].as_str().unwrap().to_string();
    let (code, r) = dldef(&[
        "parse",
        "--onto",
        "fixture:o1",
        "--concept",
        "{a}",
        "--model",
        &format!("{ws}#model1"),
    ]);
    assert_eq!(code, 0);
    assert!(r["details"]["extension"]
        .as_array()
        .unwrap()
        .iter()
        .any(|x| x == d1.as_str()));
    let (_, r) = dldef(&[
        "parse",
        "--onto",
        "fixture:o1",
        "--concept",
        "{a}",
        "--model",
        &format!("{ws}#model2"),
    ]);
    assert!(!r["details"]["extension"]
        .as_array()
        .unwrap()
        .iter()
        .any(|x| x == d2.as_str()));
    std::fs::remove_file(w).ok();
}

#[test]
fn sat_witness_is_a_model() {
    let w = scratch("sat.json");
    let ws = w.to_str().unwrap();
    let (code, _) = dldef(&[
        "sat",
        "--onto",
        "fixture:o1",
        "--concept",
        "A and exists r A",
        "--dialect",
        "alco",
        "--witness",
        ws,
    ]);
    assert_eq!(code, 0);
    let (code, r) = dldef(&[
        "parse",
        "--onto",
        "fixture:o1",
        "--concept",
        "A and exists r A",
        "--model",
        ws,
    ]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["is_model"], true);
    assert!(!r["details"]["extension"].as_array().unwrap().is_empty());
    std::fs::remove_file(w).ok();
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(dldef(&["parse", "--onto", "/no/such/file"]).0, 2);
    assert_eq!(
        dldef(&["sat", "--concept", "A and", "--dialect", "alco"]).0,
        2
    );
    assert_eq!(dldef(&["sat", "--concept", "A"]).0, 2);
    assert_eq!(
        dldef(&["sat", "--concept", "exists r- A", "--dialect", "alco"]).0,
        2
    );
    let (code, r) = dldef(&[
        "definition-exists",
        "--onto",
        "fixture:o1",
        "--concept",
        "{a}",
        "--sigma",
        "C:Z",
        "--dialect",
        "alco",
    ]);
    assert_eq!(code, 2);
    assert_eq!(r["outcome"], "input-error");
}

#[test]
fn budgets_exit_three() {
    let (code, r) = dldef(&[
        "definition-exists",
        "--onto",
        "fixture:spy",
        "--concept",
        "{d2}",
        "--sigma",
        "C:Spy R:suspects R:deceives",
        "--dialect",
        "alcio",
        "--budget-types",
        "8",
    ]);
    assert_eq!(code, 3, "{r}");
    assert_eq!(r["outcome"], "budget-exhausted");
    let (code, r) = dldef(&[
        "oracle-enumdef",
        "--onto",
        "fixture:o1",
        "--concept",
        "{a}",
        "--sigma",
        "C:A R:r",
        "--dialect",
        "alco",
        "--max-candidates",
        "10",
    ]);
    assert_eq!(code, 3);
    assert_eq!(r["details"]["reason"], "candidates");
}

#[test]
fn seeded_drivers_are_reproducible() {
    let a = dldef(&["oracle-joint", "--dialect", "alchio", "--seed", "11"]);
    let b = dldef(&["oracle-joint", "--dialect", "alchio", "--seed", "11"]);
    assert_eq!(a, b);
    assert!(a.1["inputs"]["ontology"].is_string());
}

#[test]
fn reports_are_byte_stable() {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_dldef"))
            .args([
                "definition-exists",
                "--onto",
                "fixture:o2",
                "--concept",
                "exists r top",
                "--sigma",
                "R:r1 R:r2",
                "--dialect",
                "alch",
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}
