use std::process::{Command, Output};

use serde_json::Value;

fn mas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mas")).args(args).env_remove("MAS_SEED").output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn selftest_passes_and_detects_injected_fault() {
    let ok = mas(&["selftest"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(json(&ok)["verdict"], "pass");
    let bad = mas(&["selftest", "--inject-fault"]);
    assert_eq!(code(&bad), 1);
    assert_eq!(json(&bad)["verdict"], "fail");
}

#[test]
fn envelope_carries_seed_and_samples() {
    let o = mas(&["--seed", "7", "--samples", "12", "classify", "--a", "x1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["report_version"], 1);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["samples"], 12);
    assert_eq!(v["verdict"], "info");
}

#[test]
fn same_seed_gives_identical_output() {
    let args = ["--seed", "99", "triple", "--a", "1 + x1^2"];
    assert_eq!(mas(&args).stdout, mas(&args).stdout);
    let other = mas(&["--seed", "100", "triple", "--a", "1 + x1^2"]);
    assert_ne!(mas(&args).stdout, other.stdout);
}

#[test]
fn seed_can_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_mas"))
        .args(["classify", "--a", "1"])
        .env("MAS_SEED", "1234")
        .output()
        .unwrap();
    assert_eq!(json(&o)["seed"], 1234);
}

#[test]
fn parse_errors_exit_2_with_offset() {
    let o = mas(&["classify", "--a", "1+"]);
    assert_eq!(code(&o), 2);
    let v = json(&o);
    assert_eq!(v["verdict"], "error");
    assert_eq!(v["error"]["stage"], "parse");
    assert_eq!(v["error"]["offset"], 2);
    assert!(!o.stderr.is_empty());
}

#[test]
fn invalid_options_exit_2() {
    assert_eq!(code(&mas(&["--tol", "0", "selftest"])), 2);
    assert_eq!(code(&mas(&["--samples", "0", "selftest"])), 2);
    assert_eq!(code(&mas(&["hitchin", "--structure", "euler2d"])), 2);
    assert_eq!(code(&mas(&["grid", "--csv", "/nonexistent/file.csv"])), 2);
}

#[test]
fn constant_coefficient_triple_reports_sign_failure() {
    // TI = S only holds up to the sign of the pfaffian
    let o = mas(&["triple", "--a", "-2"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["verdict"], "fail");
    assert_eq!(code(&mas(&["triple", "--a", "2"])), 0);
}

#[test]
fn burgers_consistent_source_passes() {
    let o = mas(&["burgers", "--gamma", "2", "--psi", "x1^2 + x2^2", "--dp", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = mas(&["burgers", "--gamma", "2", "--psi", "x1^2 + x2^2", "--dp", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn hitchin_and_reductions() {
    assert_eq!(code(&mas(&["hitchin"])), 0);
    assert_eq!(code(&mas(&["reduce", "--action", "laplace3d"])), 0);
    assert_eq!(code(&mas(&["reduce", "--action", "stretching"])), 0);
}

#[test]
fn curvature_is_informational() {
    let o = mas(&["curvature", "--a", "x1^2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verdict"], "info");
}

#[test]
fn grid_synthetic_and_csv_round_trip() {
    let dir = std::env::temp_dir().join(format!("mas-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tg.csv");
    let p = path.to_str().unwrap();
    let a = mas(&["grid", "--synthetic", "taylor-green", "--n", "16", "--write-csv", p]);
    assert_eq!(code(&a), 0);
    let b = mas(&["grid", "--csv", p]);
    assert_eq!(code(&b), 0);
    assert_eq!(json(&a)["result"], json(&b)["result"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_mode_and_out_file() {
    let o = mas(&["--text", "selftest"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("mas selftest: pass"), "{s}");
    let dir = std::env::temp_dir().join(format!("mas-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let o = mas(&["--out", path.to_str().unwrap(), "hitchin"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "hitchin");
    std::fs::remove_dir_all(&dir).unwrap();
}
