use std::process::{Command, Output};

use serde_json::Value;

fn data(f: &str) -> String {
    format!("{}/data/{f}", env!("CARGO_MANIFEST_DIR"))
}

fn kfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let o = kfree(&a);
    let v = serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)));
    (code(&o), v)
}

fn ints(v: &Value) -> Vec<i64> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| {
            x.as_str()
                .map_or_else(|| x.as_i64().unwrap(), |s| s.parse().unwrap())
        })
        .collect()
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(code(&kfree(&["sieve", "enumerate", "--bund", "3"])), 2);
    assert_eq!(code(&kfree(&["nonsense"])), 2);
}

#[test]
fn missing_spec_is_a_usage_error() {
    assert_eq!(code(&kfree(&["sieve", "enumerate", "--bound", "3"])), 2);
}

#[test]
fn missing_file_exits_3() {
    let o = kfree(&["--spec", "no/such.sv", "sieve", "enumerate", "--bound", "3"]);
    assert_eq!(code(&o), 3);
    assert_eq!(
        code(&kfree(&["linmap", "units", "--map", "no/such.map"])),
        3
    );
}

#[test]
fn parse_errors_exit_4() {
    assert_eq!(
        code(&kfree(&[
            "lg",
            "surjectivity",
            "--algebra",
            "Q(sqrt",
            "--k",
            "2",
            "--p",
            "3"
        ])),
        4
    );
}

#[test]
fn bad_input_exits_5() {
    assert_eq!(
        code(&kfree(&[
            "lg",
            "surjectivity",
            "--algebra",
            "Q(sqrt 12)",
            "--k",
            "2",
            "--p",
            "3"
        ])),
        5
    );
}

#[test]
fn overflow_exits_7() {
    assert_eq!(
        code(&kfree(&["shift", "orbit", "--x", "1,5", "--m", "-8..8"])),
        7
    );
}

#[test]
fn output_is_deterministic() {
    let args = ["--spec", &data("sq.sv"), "shift", "symmetries", "--W", "1"];
    let (a, b) = (kfree(&args), kfree(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn enumerate_squarefree() {
    let (c, v) = json(&[
        "--spec",
        &data("sq.sv"),
        "sieve",
        "enumerate",
        "--bound",
        "10",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["count"], 14);
    assert_eq!(v["command"], "sieve enumerate");
    assert_eq!(v["config"]["bound"], 10);
}

#[test]
fn symmetry_figure() {
    let (c, v) = json(&[
        "--spec",
        &data("sym56.sv"),
        "shift",
        "apply",
        "--code",
        &data("sym56.code"),
        "--pattern",
        &data("fig4.pat"),
    ]);
    assert_eq!(c, 0);
    assert_eq!(ints(&v["result"]["image"]), [-3, -1, 2, 4, 9, 17, 18, 19]);
}

#[test]
fn factor_figures() {
    for f in ["fig5a.pat", "fig5b.pat"] {
        let (c, v) = json(&[
            "--spec",
            &data("factor_r.sv"),
            "shift",
            "apply",
            "--code",
            &data("factor.code"),
            "--pattern",
            &data(f),
        ]);
        assert_eq!(c, 0);
        assert_eq!(ints(&v["result"]["image"]), [6, 12, 18, 21]);
    }
}

#[test]
fn intertwiners_verify() {
    let (c, _) = json(&[
        "--spec",
        &data("factor_r.sv"),
        "shift",
        "verify",
        "--code",
        &data("factor.code"),
        "--target-spec",
        &data("factor_s.sv"),
        "--preimage",
        &data("factor_pre.code"),
        "--trials",
        "20",
    ]);
    assert_eq!(c, 0);
    let (c, _) = json(&[
        "--spec",
        &data("third_r.sv"),
        "shift",
        "verify",
        "--code",
        &data("third.code"),
        "--target-spec",
        &data("third_s.sv"),
        "--trials",
        "20",
    ]);
    assert_eq!(c, 0);
}

#[test]
fn inclusion_fails_at_two() {
    let (c, v) = json(&[
        "--spec",
        &data("sq.sv"),
        "linmap",
        "scan",
        "--map",
        "incl_Q_sqrt3",
        "--P",
        "10",
    ]);
    assert_eq!(c, 1);
    assert_eq!(v["result"]["failure"]["p"], 2);
}

#[test]
fn shear_breaks_units() {
    let (c, v) = json(&["linmap", "units", "--map", &data("shear.map"), "--H", "20"]);
    assert_eq!(c, 1);
    assert_eq!(v["result"]["witness"]["unit"], "-1+w");
}

#[test]
fn entropy_encloses_known_value() {
    let (c, v) = json(&[
        "--spec",
        &data("sq.sv"),
        "entropy",
        "product",
        "--cutoff",
        "100000",
    ]);
    assert_eq!(c, 0);
    let lo: f64 = v["result"]["entropy"]["lo"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    let hi: f64 = v["result"]["entropy"]["hi"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!(lo <= 0.421383 && 0.421383 <= hi, "[{lo}, {hi}]");
    assert_eq!(v["result"]["routes_agree"], true);
}

#[test]
fn solve_mod_four() {
    let (c, v) = json(&[
        "--spec",
        &data("sq.sv"),
        "lg",
        "solve",
        "--cong",
        "2^2=3",
        "--bound",
        "10",
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["result"]["y"], "3");
}

#[test]
fn selftests_pass() {
    for g in [
        ["sieve", "density"],
        ["lg", "solve"],
        ["linmap", "cover"],
        ["shift", "orbit"],
        ["entropy", "zeta"],
    ] {
        let o = kfree(&[g[0], g[1], "--selftest"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn threads_do_not_change_results() {
    let run = |t: &str| {
        kfree(&[
            "--threads",
            t,
            "--spec",
            &data("sq.sv"),
            "entropy",
            "empirical",
            "--N",
            "10",
        ])
        .stdout
    };
    let strip = |o: Vec<u8>| {
        String::from_utf8(o)
            .unwrap()
            .lines()
            .filter(|l| !l.contains("threads"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(run("1")), strip(run("2")));
}
