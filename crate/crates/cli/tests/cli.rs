use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exactreal")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn eval_prints_decimals() {
    assert_eq!(ok(&["eval", "1/3 + 2/3", "--digits", "5"]).trim(), "1.00000");
    assert_eq!(ok(&["eval", "exp(1)", "--digits", "5"]).trim(), "2.71828");
    assert_eq!(ok(&["eval", "x * 2", "--var", "x=1/4", "--digits", "3"]).trim(), "0.500");
}

#[test]
fn eval_dyadic_output_is_an_approximation() {
    let s = ok(&["eval", "1/3", "--prec", "10", "--format", "dyadic"]);
    let (a, e) = s.trim().split_once("*2^-").unwrap();
    assert_eq!(e, "10");
    let a: i64 = a.parse().unwrap();
    assert!((a * 3 - 1024).abs() <= 3);
}

#[test]
fn exit_codes_follow_error_kind() {
    assert_eq!(run(&["eval", "sqrt(-1)"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "recip(0; 5)"]).status.code(), Some(3));
    assert_eq!(run(&["eval", "2*"]).status.code(), Some(4));
    assert_eq!(run(&["bogus"]).status.code(), Some(4));
    let o = run(&["eval", "2*"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn precision_cap_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_exactreal"))
        .args(["eval", "recip(1 - 1)", "--digits", "5"])
        .env("EXACTREAL_MAX_PREC", "64")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_exactreal"))
        .args(["eval", "1/7", "--digits", "5"])
        .env("EXACTREAL_MAX_PREC", "64")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn logistic_first_steps() {
    assert_eq!(ok(&["logistic", "--steps", "1"]).trim(), "0.9375000000");
    assert_eq!(ok(&["logistic", "--steps", "2", "--mode", "rational"]).trim(), "0.2197265625");
    assert_eq!(ok(&["logistic", "--steps", "30", "--digits", "10"]).trim(), "0.7180965684");
}

#[test]
fn bench_writes_csv() {
    let dir = std::env::temp_dir().join(format!("exactreal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("add.csv");
    let p = path.to_str().unwrap();
    ok(&["bench", "--op", "add", "--n-range", "64:128:*2", "--reps", "1", "--csv", p]);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains(','));
    assert_eq!(lines.count(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn demos_report_ok() {
    for args in [
        &["demo", "max"][..],
        &["demo", "integrate", "--n", "8"],
        &["demo", "ode", "--n", "8"],
        &["demo", "ev", "--n", "20", "--count", "3"],
        &["ev", "--a11", "1", "--a12", "2", "--a22", "3"],
    ] {
        let s = ok(args);
        assert!(s.contains(" ok"), "{args:?}: {s}");
        assert!(!s.contains("FAIL"), "{args:?}: {s}");
    }
}

#[test]
fn ode_trace_is_csv() {
    let s = ok(&["demo", "ode", "--n", "6", "--trace"]);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("t,center,radius"));
    let rows: Vec<_> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.split(',').count() == 3));
    assert_eq!(ok(&["demo", "ode", "--n", "6", "--stream"]), s);
}
