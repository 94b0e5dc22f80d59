use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn game(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games").join(name);
    p.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bidding")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_prints_the_ladder_table() {
    let o = run(&["solve", &game("ladder.json")]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "vertex 0 0* 1 1* 2 2* 3 3* 4 4* 5 5*");
    assert_eq!(lines.next().unwrap(), "v1 3 2 2 1 1 1 0 0 0 0 0 0");
}

#[test]
fn solve_json_uses_inf_sentinel() {
    let o = run(&["solve", &game("selfloop-neg.json"), "--format", "json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["energy"]["v"]["2*"], "+inf");
}

#[test]
fn thresholds_report_average_property() {
    for g in ["ladder.json", "triangle.json", "selfloop-neg.json"] {
        let out = stdout(&run(&["thresholds", &game(g)]));
        assert!(out.contains("average-property: OK"), "{g}: {out}");
        assert!(out.contains("average-property (complement): OK"), "{g}: {out}");
    }
    let out = stdout(&run(&["thresholds", &game("selfloop-neg.json")]));
    assert!(out.contains("v none 0"), "{out}");
}

#[test]
fn mean_payoff_simulations() {
    let o = run(&[
        "simulate",
        &game("triangle.json"),
        "--init",
        "v0:1*",
        "--energy",
        "0",
        "--pres",
        "vi",
        "--cons",
        "vi",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("outcome: cycle (v0 v2)"), "{out}");
    assert!(out.contains("mean-payoff: 3/2"), "{out}");

    let out = stdout(&run(&[
        "simulate",
        &game("triangle.json"),
        "--init",
        "v0:0*",
        "--pres",
        "vi",
        "--cons",
        "vi",
    ]));
    assert!(out.contains("outcome: cycle (v0 v1 v0 v2)"), "{out}");
    assert!(out.contains("mean-payoff: 1/4"), "{out}");
}

#[test]
fn energy_simulation_traces() {
    let out = stdout(&run(&[
        "simulate",
        &game("selfloop-neg.json"),
        "--init",
        "v:1",
        "--energy",
        "3",
        "--pres",
        "random",
        "--cons",
        "random",
    ]));
    assert!(out.contains("outcome: cons-win at step 4"), "{out}");
    let records: Vec<&str> = out.lines().filter(|l| !l.starts_with('#') && !l.contains(':')).collect();
    assert_eq!(records.len(), 4);
    assert!(records.iter().all(|l| l.split_whitespace().count() == 8));
    assert!(records[3].ends_with(" -1"));

    for pres in ["vi", "agn", "positional"] {
        for cons in ["cycle-skip", "positional", "random"] {
            let o = run(&[
                "simulate",
                &game("ladder.json"),
                "--init",
                "v1:1",
                "--energy",
                "5",
                "--pres",
                pres,
                "--cons",
                cons,
                "--steps",
                "200",
            ]);
            let out = stdout(&o);
            assert!(o.status.success(), "{pres} {cons}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(!out.contains("cons-win"), "{pres} {cons}: {out}");
        }
    }
}

#[test]
fn undefined_strategy_is_an_error() {
    // Cons is below its threshold everywhere on the ladder.
    let o = run(&["simulate", &game("ladder.json"), "--init", "v1:1", "--energy", "5", "--cons", "agn"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unwinnable"));
    let o = run(&["simulate", &game("selfloop-neg.json"), "--init", "v:0", "--pres", "random", "--cons", "agn"]);
    assert!(stdout(&o).contains("cons-win"));
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate",
        &game("ladder.json"),
        "--init",
        "v2:2",
        "--energy",
        "4",
        "--pres",
        "random",
        "--cons",
        "random",
        "--seed",
        "11",
        "--steps",
        "50",
    ];
    let args: Vec<&str> = args.to_vec();
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn certify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&good, r#"{"thresholds": {"v1": "0", "v2": "0", "t": "0"}}"#).unwrap();
    std::fs::write(&bad, r#"{"thresholds": {"v1": "1", "v2": "1", "t": "1"}}"#).unwrap();
    let g = game("ladder.json");
    let g = std::path::Path::new(&g);
    let o = run(&["certify", path(g), path(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ACCEPT");
    let o = run(&["certify", path(g), path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("REJECT"));
}

#[test]
fn decide_exit_codes() {
    let o = run(&["decide", &game("selfloop-neg.json"), "--vertex", "v", "--level", "0*"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["decide", &game("ladder.json"), "--vertex", "v1", "--level", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["decide", &game("ladder.json"), "--vertex", "v1", "--level", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn oracle_agrees() {
    let o = run(&["oracle", &game("ladder.json"), "--horizon", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("n=4: agree"));
    assert!(out.contains("thresholds: agree"));
}

#[test]
fn strategy_formats() {
    let o = run(&["strategy", &game("ladder.json"), "--player", "pres"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("vertex budget bid target\n"));
    assert!(out.contains("v2 0* 0* t"), "{out}");
    let o = run(&["strategy", &game("selfloop-neg.json"), "--player", "cons", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["player"], "cons");
    assert_eq!(v["entries"][0]["vertex"], "v");
}

#[test]
fn meanpayoff_winners() {
    let o = run(&["meanpayoff", &game("triangle.json"), "--target", "3/2"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("v0 1* max"), "{out}");
    assert!(out.contains("v0 0 min"), "{out}");
}

#[test]
fn errors_are_json_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"vertices\": [\"a\",,]}").unwrap();
    for args in [
        vec!["solve", path(&broken)],
        vec!["solve", "/nonexistent/game.json"],
        vec!["frobnicate"],
        vec!["decide", &game("ladder.json"), "--vertex", "zz", "--level", "0"],
        vec!["simulate", &game("ladder.json"), "--init", "v1"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
        assert!(err["message"].is_string());
    }
    let o = run(&["solve", path(&broken)]);
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert!(err["message"].as_str().unwrap().contains("line 1"));
}
