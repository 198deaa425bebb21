use std::process::{Command, Output};

fn compspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compspec"))
        .args(args)
        .env_remove("COMPSPEC_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn classify_quadratic_as_json() {
    let o = compspec(&["classify", "--symbol", "-x^2+1.5*x", "--interval", "(-inf,inf)", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["case"], "Prop 4.4");
    assert_eq!(v["sigma"]["kind"], "all_plane");
    assert_eq!(v["sigma_p"]["values"], serde_json::json!(["1"]));
}

#[test]
fn solve_reports_divergence() {
    let o = compspec(&["solve", "--symbol", "-x^2+x", "--lambda", "2", "--gamma", "x", "--order", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("c_5 = -34"), "{text}");
    assert!(text.contains("c_30 = "));
    assert!(text.lines().last().unwrap().starts_with("verdict: diverges"), "{text}");
}

#[test]
fn eval_reports_value_and_residual() {
    let o = compspec(&["eval", "--symbol", "1/2*arctan(x)", "--lambda", "2", "--gamma", "1", "--at", "10", "--precision", "256"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("f(10) = -1"), "{text}");
    assert!(text.contains("residual: 0"), "{text}");
    assert!(text.contains("within 2^-224"), "{text}");

    let o = compspec(&["eval", "--symbol", "1/2*arctan(x)", "--lambda", "2", "--gamma", "x", "--at", "-7/3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["evaluation"]["residual_ok"], true);
    assert_eq!(v["evaluation"]["chain"][0]["rule"], "forward_orbit");
}

#[test]
fn section1_orientation_rescales_gamma() {
    let args = ["solve", "--symbol", "x/2", "--lambda", "5", "--gamma", "1", "--order", "16", "--format", "json"];
    let plain = json(&compspec(&args));
    let mut flipped = args.to_vec();
    flipped.extend(["--orientation", "section1"]);
    let v = json(&compspec(&flipped));
    assert_eq!(v["gamma_scale"], "-5");
    assert!(v["note"].as_str().unwrap().contains("γ = −λγ̃"));
    // f = −1/4 for γ = 1, so γ = −5 gives 5/4
    assert_eq!(plain["solution"]["series"]["coeffs"][0], "-1/4");
    assert_eq!(v["solution"]["series"]["coeffs"][0], "5/4");
}

#[test]
fn remaining_commands() {
    let o = compspec(&["koenigs", "--symbol", "x/2-x^2", "--order", "16"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c_2 = -4"));

    let o = compspec(&["orbit", "--mu", "3", "--depth", "40"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("strictly decreasing: true") && text.contains("all ratios below 2/mu: true"), "{text}");

    let o = compspec(&["obstruct", "--symbol", "x^3", "--lambda", "-1", "--pieces", "(-inf,0);(-1,1);(0,inf)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("verdict: not surjective\n"));

    let o = compspec(&["obstruct", "--symbol", "-x^2+3/2*x", "--lambda", "2", "--pieces", "*(-inf,1/2)|(1,inf);(0,3/2)", "--format", "json"]);
    assert_eq!(json(&o)["verdict"], "not_surjective");

    let o = compspec(&["demo45", "--mu", "3", "--lambda", "-1/2", "--k", "8", "--c", "1/8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["margin"], "1/4");
    assert_eq!(v["gamma0"], "(2 − x)");
    assert_eq!(v["contradiction"], true);
}

#[test]
fn exit_codes() {
    // usage errors
    for args in [
        vec!["classify", "--symbol", "x^^2"],
        vec!["classify"],
        vec!["solve", "--symbol", "x/2", "--lambda", "two", "--gamma", "1"],
        vec!["orbit", "--mu", "3", "--precision", "8"],
        vec!["orbit", "--mu", "2"],
        vec!["frobnicate"],
    ] {
        assert_eq!(compspec(&args).status.code(), Some(1), "{args:?}");
    }
    // typed mathematical errors
    for args in [
        vec!["solve", "--symbol", "x/2", "--lambda", "1/4", "--gamma", "x^2"],
        vec!["eval", "--symbol", "x^2", "--lambda", "2", "--gamma", "1", "--at", "2"],
        vec!["koenigs", "--symbol", "-x^2+x"],
    ] {
        assert_eq!(compspec(&args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(compspec(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_errors_name_the_error() {
    let o = compspec(&["solve", "--symbol", "x/2", "--lambda", "1/4", "--gamma", "x^2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["error"], "ResonantEigenvalue");
    assert!(!o.stderr.is_empty());
}

const CATALOG: [&[&str]; 7] = [
    &["classify", "--symbol", "1/2*arctan(x)"],
    &["solve", "--symbol", "-x^2+x", "--lambda", "-1", "--gamma", "x", "--order", "20"],
    &["eval", "--symbol", "-x^2+x", "--lambda", "2", "--gamma", "(-x^2+x)^3 - 2*x^3", "--at", "-3/2"],
    &["koenigs", "--symbol", "1/2*arctan(x)", "--order", "12"],
    &["orbit", "--mu", "5/2", "--depth", "12"],
    &["obstruct", "--symbol", "x^3", "--lambda", "i", "--pieces", "(-inf,0);(-1,1);(0,inf)"],
    &["demo45", "--mu", "3", "--lambda", "-1/2"],
];

#[test]
fn json_round_trips_and_is_deterministic() {
    for args in CATALOG {
        let mut args = args.to_vec();
        args.extend(["--format", "json"]);
        let first = compspec(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        let v = json(&first);
        let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(again, v, "{args:?}");
        assert_eq!(compspec(&args).stdout, first.stdout, "{args:?} is not deterministic");
    }
}

#[test]
fn precision_from_environment() {
    let run = |bits: &str| {
        Command::new(env!("CARGO_BIN_EXE_compspec"))
            .args(["orbit", "--mu", "3", "--depth", "3", "--format", "json"])
            .env("COMPSPEC_PRECISION", bits)
            .output()
            .unwrap()
    };
    let o = run("128");
    assert_eq!(json(&o)["precision"], 128);
    assert_eq!(run("10").status.code(), Some(1));
    assert_eq!(json(&compspec(&["orbit", "--mu", "3", "--depth", "3", "--format", "json"]))["precision"], 256);
}
