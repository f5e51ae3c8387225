use std::process::{Command, Output};

use serde_json::Value;

const SCMP12: &str = r#"{"n":2,"kind":"scmp","generators":[["1","2"]]}"#;
const MAXIMIN: &str = r#"{"kind":"relative_fair","weights":{"n":2,"vertices":[["1","0"],["0","1"]]}}"#;
const UTIL: &str = r#"{"kind":"relative_fair","weights":{"n":2,"vertices":[["1/2","1/2"]]}}"#;
const KS: &str = r#"{"kind":"ks"}"#;

fn relfair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relfair")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json report")
}

#[test]
fn solve_maximin_example() {
    let o = relfair(&["solve", SCMP12, MAXIMIN]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("value: 1/2"), "{out}");
    assert!(out.contains("witnesses: (1,2) (2,1)"), "{out}");

    let v = json(&relfair(&["solve", SCMP12, MAXIMIN, "--format", "json"]));
    assert_eq!(v["value"], "1/2");
    assert_eq!(v["witnesses"], serde_json::json!([["1", "2"], ["2", "1"]]));
    assert_eq!(v["pieces"].as_array().unwrap().len(), 2);
}

#[test]
fn solve_ks_example() {
    let v = json(&relfair(&["solve", SCMP12, KS, "--format", "json"]));
    assert_eq!(v["witnesses"], serde_json::json!([["1", "1"]]));
}

#[test]
fn input_errors_exit_2() {
    let bad = r#"{"n":2,"generators":[["1/x","2"]]}"#;
    let o = relfair(&["solve", bad, KS]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed rational"));
    assert_eq!(code(&relfair(&["solve", r#"{"n":2,"generators":[["-1","2"]]}"#, KS])), 2);
    assert_eq!(code(&relfair(&["solve", SCMP12, r#"{"kind":"mean_sd"}"#])), 2);
    assert_eq!(code(&relfair(&["solve", "/nonexistent/problem.json", KS])), 2);
    assert_eq!(code(&relfair(&["solve", SCMP12, KS, "--format", "svg"])), 2);
    assert_eq!(code(&relfair(&["axioms", KS, "--axioms", "fairness"])), 2);
    assert_eq!(code(&relfair(&["solve", SCMP12, KS, "--tol", "abc"])), 2);
}

#[test]
fn ks_violates_intermediate_pareto() {
    let o = relfair(&["axioms", KS, "--axioms", "intermediate_pareto", "--budget", "20", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let cell = &v["cells"][0];
    assert_eq!(cell["status"], "violation");
    assert_eq!(cell["rule"], "ks");
    assert_eq!(cell["axiom"], "intermediate_pareto");
    let w = &cell["witness"];
    assert_eq!(w["instance"]["x"]["generators"], serde_json::json!([["1", "2"], ["2", "1"]]));
    assert_eq!(w["point"], serde_json::json!(["1", "1"]));
}

#[test]
fn maximin_passes_characterizing_axioms() {
    let o = relfair(&["axioms", MAXIMIN, "--budget", "200"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn uncertifiable_rule_exits_3() {
    let rule = r#"{"kind":"relative_fair","weights":{"n":2,"vertices":[["1","0"],["0","1"]]},"p":"1/2"}"#;
    let o = relfair(&["axioms", rule, "--axioms", "scale_invariance", "--budget", "10"]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
}

#[test]
fn single_instance_check() {
    let inst = r#"{"type":"problem","x":{"n":2,"kind":"scmp","generators":[["1","2"]]}}"#;
    assert_eq!(code(&relfair(&["axioms", KS, "--axioms", "intermediate_pareto", "--instance", inst])), 1);
    assert_eq!(code(&relfair(&["axioms", KS, "--axioms", "weak_pareto", "--instance", inst])), 0);
    assert_eq!(code(&relfair(&["axioms", KS, "--axioms", "hammond_eai", "--instance", inst])), 2);
}

#[test]
fn reports_round_trip_through_replay() {
    let dir = std::env::temp_dir().join(format!("relfair-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let p = path.to_str().unwrap();
    let o = relfair(&["axioms", UTIL, "--axioms", "hammond_eai", "--format", "json", "--out", p]);
    assert_eq!(code(&o), 1);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let replayed = json(&relfair(&["axioms", UTIL, "--replay", p, "--format", "json"]));
    let strip = |c: &Value| (c["axiom"].clone(), c["status"].clone(), c["witness"]["instance"].clone());
    assert_eq!(strip(&saved["cells"][0]), strip(&replayed["cells"][0]));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn matrix_reproduces_assignment_at_small_budget() {
    let o = relfair(&["matrix", "--budget", "100"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("independence assignment reproduced"));
}

#[test]
fn eqeq_of_maximin_is_the_minimum() {
    let v = json(&relfair(&["eqeq", MAXIMIN, "2,4", "--format", "json"]));
    assert_eq!(v["value"], "2");
    let v = json(&relfair(&["eqeq", UTIL, "2,4", "--tol", "2^-20", "--format", "json"]));
    let w: f64 = {
        let s = v["value"].as_str().unwrap();
        let (a, b) = s.split_once('/').unwrap();
        a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap()
    };
    assert!((w - 3.0).abs() <= 2f64.powi(-20), "{w}");
}

#[test]
fn oracle_agrees_on_random_problems() {
    let o = relfair(&["oracle", MAXIMIN, "--count", "10"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = relfair(&["oracle", KS, "--problem", SCMP12, "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["results"][0]["report"]["gap"], "0");
}

#[test]
fn plots() {
    let o = relfair(&["plot", SCMP12, MAXIMIN]);
    assert_eq!(code(&o), 0);
    let svg = stdout(&o);
    assert_eq!(svg.matches("<rect").count(), 2);
    assert_eq!(svg.matches(r#"class="piece""#).count(), 2);
    assert_eq!(stdout(&relfair(&["plot", SCMP12, MAXIMIN])), svg, "plot bytes are deterministic");

    let ks = stdout(&relfair(&["plot", SCMP12, KS]));
    let choice = ks.split(r#"<g id="choice""#).nth(1).unwrap().split("</g>").next().unwrap();
    assert_eq!(choice.matches("<line").count(), 0);
    assert!(choice.contains("witness (1,1)"));

    let three = r#"{"n":3,"generators":[["1","1","1"]]}"#;
    assert_eq!(code(&relfair(&["plot", three, KS])), 2);
}
