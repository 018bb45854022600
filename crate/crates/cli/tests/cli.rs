use std::process::{Command, Output};

fn noricert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noricert"))
        .arg("verify")
        .args(args)
        .env_remove("NORICERT_BUDGET")
        .output()
        .expect("binary runs")
}

const FAST: [&str; 4] = ["--samples", "300", "--atlas-samples", "500"];

fn fast(extra: &[&str]) -> Output {
    let mut args: Vec<&str> = FAST.to_vec();
    args.extend_from_slice(extra);
    noricert(&args)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn certified_run_exits_zero() {
    let out = fast(&["--n", "2..3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["summary"]["exit_code"], 0);
    assert_eq!(v["summary"]["refuted"], 0);
    assert_eq!(v["per_n"].as_array().unwrap().len(), 2);
    assert_eq!(v["summary"]["escape"], serde_json::json!([[2, 1], [3, 2]]));
}

#[test]
fn one_divisibility_record_for_n2() {
    let v = json(&fast(&["--n", "2", "--format", "json"]));
    let certs = v["per_n"][0]["certificates"].as_array().unwrap();
    let div = certs.iter().filter(|c| c["kind"] == "divisibility").count();
    assert_eq!(div, 1);
}

#[test]
fn bad_epsilon_is_refuted() {
    let out = fast(&["--n", "2", "--eps", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fast(&["--n", "2", "--eps", "1/2", "--unsafe-eps", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["summary"]["refuted"].as_u64().unwrap() > 0);
}

#[test]
fn configuration_errors_exit_64() {
    for args in [
        &["--n", "1"][..],
        &["--n", "2", "--r", "9/10"],
        &["--n", "2", "--r", "abc"],
        &["--n", "9"],
        &["--bogus"],
    ] {
        let out = fast(args);
        assert_eq!(out.status.code(), Some(64), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn tiny_budget_is_a_non_answer() {
    let out = fast(&["--n", "2", "--budget", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["summary"]["refuted"], 0);
    assert!(v["summary"]["undecided"].as_u64().unwrap() > 0);
}

#[test]
fn budget_from_environment() {
    let mut args: Vec<&str> = vec!["verify"];
    args.extend_from_slice(&FAST);
    args.extend_from_slice(&["--n", "2"]);
    let out = Command::new(env!("CARGO_BIN_EXE_noricert"))
        .args(&args)
        .env("NORICERT_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_is_deterministic_apart_from_timing() {
    let strip = |out: Output| {
        let mut v = json(&out);
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = strip(fast(&["--n", "2", "--format", "json", "--seed", "11"]));
    let b = strip(fast(&["--n", "2", "--format", "json", "--seed", "11"]));
    assert_eq!(a, b);
    assert_eq!(a["params"]["seed"], 11);
}

#[test]
fn text_report_lists_verdicts() {
    let out = fast(&["--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("n = 2") || text.contains("n=2"), "{text}");
}
