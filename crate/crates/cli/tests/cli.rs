use std::path::PathBuf;
use std::process::{Command, Output};

fn twosat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twosat")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twosat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exit_codes() {
    assert_eq!(twosat(&["--help"]).status.code(), Some(0));
    assert_eq!(twosat(&["--version"]).status.code(), Some(0));
    assert_eq!(twosat(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(twosat(&["gen", "--n", "3", "--m", "100"]).status.code(), Some(1));
    assert_eq!(twosat(&["window", "--n", "64", "--delta", "0.7"]).status.code(), Some(1));
    assert_eq!(twosat(&["solve", "/nonexistent/f.cnf"]).status.code(), Some(3));
    let bad = scratch("bad.cnf");
    std::fs::write(&bad, "p cnf 2 1\n1 2 -1 0\n").unwrap();
    assert_eq!(twosat(&["solve", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn solve_reports_both_outcomes() {
    let sat = scratch("sat.cnf");
    std::fs::write(&sat, "p cnf 2 2\n1 2 0\n-1 2 0\n").unwrap();
    let out = twosat(&["solve", sat.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("s SATISFIABLE"), "{text}");
    let v = text.lines().find(|l| l.starts_with("v ")).unwrap();
    assert!(v.split_whitespace().any(|t| t == "2"), "{text}");

    let unsat = scratch("unsat.cnf");
    let g = twosat(&["gen", "--n", "2", "--m", "4"]);
    std::fs::write(&unsat, &g.stdout).unwrap();
    let out = twosat(&["solve", unsat.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("s UNSATISFIABLE"));
}

#[test]
fn config_file_merges_under_explicit_flags() {
    let cfg = scratch("sweep.json");
    std::fs::write(&cfg, r#"{"n":[64],"axis":{"lambda":[-1,0]},"trials":30,"seed":4}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = twosat(&["sweep", "--config", cfg]);
    assert!(from_file.status.success(), "{}", String::from_utf8_lossy(&from_file.stderr));
    let explicit = twosat(&["sweep", "--n", "64", "--lambda", "-1,0", "--trials", "30", "--seed", "4"]);
    assert_eq!(from_file.stdout, explicit.stdout);

    let overridden = twosat(&["sweep", "--config", cfg, "--trials", "10"]);
    let rows = String::from_utf8(overridden.stdout).unwrap();
    let row = rows.lines().nth(1).unwrap();
    assert_eq!(row.split(',').nth(4), Some("10"), "{rows}");
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("gen.cnf");
    let out = twosat(&["gen", "--n", "10", "--m", "12", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("p cnf 10 12"), "{text}");
}
