use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcoalg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = run(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid json")
}

#[test]
fn kernel_identity_and_value() {
    let v = json(&["kernel", "--time", "0,1"]);
    let k0 = &v["kernels"][0]["matrix"];
    assert_eq!(k0[0][0], "1");
    assert_eq!(k0[0][1], "0");
    let p: f64 = v["kernels"][1]["matrix"][3][3].as_str().unwrap().parse().unwrap();
    let expected = (1.0 + 2.0 * (-2.0f64).exp() + (-4.0f64).exp()) / 4.0;
    assert!((p - expected).abs() < 1e-10);
}

#[test]
fn kernel_rows_sum_to_one_in_csv() {
    let o = run(&["--format", "csv", "--lambda", "2", "--mu", "3", "kernel", "--time", "0.7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut sums = std::collections::BTreeMap::<String, f64>::new();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        *sums.entry(cells[1].to_string()).or_default() += cells[3].parse::<f64>().unwrap();
    }
    assert_eq!(sums.len(), 4);
    assert!(sums.values().all(|s| (s - 1.0).abs() < 1e-9));
}

#[test]
fn randomwalk_kernel_is_exact() {
    let v = json(&["--builtin", "randomwalk", "--radius", "3", "kernel", "--time", "2"]);
    let states: Vec<&str> = v["states"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    let from = states.iter().position(|s| *s == "0").unwrap();
    let row = &v["kernels"][0]["matrix"][from];
    let to = |s: &str| row[states.iter().position(|x| *x == s).unwrap()].as_str().unwrap().to_string();
    assert_eq!(to("-2"), "0.25");
    assert_eq!(to("0"), "0.5");
    assert_eq!(to("2"), "0.25");
}

#[test]
fn trace_in_rational_mode() {
    let o = run(&["--mode-arith", "rational", "trace", "--state", "L", "--word", "0:2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.matches("1/4").count(), 4, "{text}");
    let o = run(&["--mode-arith", "rational", "trace", "--state", "L", "--word", "1:1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn equivalence_verdicts() {
    assert_eq!(json(&["equiv", "--mode", "behavioural", "--states", "L,R"])["kind"], "EquivalentWitness");
    let v = json(&["equiv", "--mode", "trace", "--states", "0,2"]);
    assert_eq!(v["kind"], "Distinguished");
    assert_eq!(v["witness_word"], "0:1");
    let v = json(&["equiv", "--mode", "trace", "--states", "L,1", "--builtin2", "repairable3"]);
    assert_eq!(v["kind"], "IndistinguishableUpTo");
}

#[test]
fn quotients_agree() {
    for via in ["lumping", "logic"] {
        let v = json(&["quotient", "--via", via]);
        assert_eq!(v["blocks"], serde_json::json!([["0"], ["L", "R"], ["2"]]), "{via}");
    }
}

#[test]
fn quotient_output_reloads() {
    let dir = std::env::temp_dir().join(format!("gcoalg-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q.json");
    let p = path.to_str().unwrap();
    assert!(run(&["quotient", "--output", p]).status.success());
    let v = json(&["--model", p, "kernel", "--time", "0"]);
    assert_eq!(v["states"].as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_formulas() {
    let v = json(&["eval", "--formula", "(yes)_0.5 T", "--all"]);
    let values: Vec<bool> = v["values"].as_array().unwrap().iter().map(|r| r["value"].as_bool().unwrap()).collect();
    assert_eq!(values, [false, true, true, true]);
    let text = stdout(&run(&["eval", "--formula", "(yes)_0.5 T", "--state", "0"]));
    assert!(text.contains('⊥'), "{text}");
    let v = json(&["--mode-arith", "rational", "eval", "--formula", "(yes)T +_1/3 (no)T", "--state", "0"]);
    assert_eq!(v["values"][0]["value"], "2/3");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["eval", "--formula", "(yes)_1.5 T", "--all"],
        vec!["eval", "--formula", "(maybe) T", "--all"],
        vec!["trace", "--state", "Q", "--word", "0:1"],
        vec!["--tol", "0", "kernel", "--time", "1"],
        vec!["check", "--suite", "nonsense"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    }
}

#[test]
fn check_suites_and_mutations() {
    let o = run(&["check", "--suite", "samp,randomwalk,lumping"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("3 suites, 3 passed, 0 failed"));
    for mutation in ["swap-label", "first-atom"] {
        let o = run(&["check", "--suite", "distlaw,monad", "--mutate", mutation]);
        assert_eq!(o.status.code(), Some(1), "{mutation}");
        assert!(stdout(&o).contains("counterexample"), "{mutation}");
    }
}
