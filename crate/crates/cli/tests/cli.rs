use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn mutforge(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mutforge"));
    cmd.args(args).env_remove("MUTFORGE_SEED");
    if let Some(s) = seed_env {
        cmd.env("MUTFORGE_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(mutforge(&["--help"], None).status.code(), Some(0));
    assert_eq!(mutforge(&[], None).status.code(), Some(1));
    assert_eq!(mutforge(&["mutate", "--bogus"], None).status.code(), Some(1));
    let luck = corpus("Luckdraw.msol");
    assert_eq!(mutforge(&["mutate", path(&luck), "--target", "0"], None).status.code(), Some(1));
    assert_eq!(mutforge(&["mutate", path(&luck)], Some("abc")).status.code(), Some(1));
    let test = corpus("Luckdraw.test.json");
    let out = mutforge(&["score", path(&luck), path(&test), "--conditions", "tx,gas"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corpus_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.msol");
    assert_eq!(mutforge(&["mutate", missing.to_str().unwrap()], None).status.code(), Some(2));
    let broken = dir.path().join("broken.msol");
    fs::write(&broken, "contract B { function f() public { x = ; } }").unwrap();
    let out = mutforge(&["mutate", broken.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.msol:"));
    let bad_test = dir.path().join("bad.test.json");
    fs::write(&bad_test, "{").unwrap();
    let luck = corpus("Luckdraw.msol");
    assert_eq!(mutforge(&["test", path(&luck), bad_test.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn seed_variable_overrides_flag() {
    let luck = corpus("Luckdraw.msol");
    let args = ["mutate", path(&luck), "--target", "5", "--seed", "1"];
    let flag = json(&mutforge(&args, None));
    let env = json(&mutforge(&args, Some("9")));
    assert_eq!(flag["seed"], 1);
    assert_eq!(env["seed"], 9);
    let direct = json(&mutforge(&["mutate", path(&luck), "--target", "5", "--seed", "9"], None));
    assert_eq!(env, direct);
    assert_ne!(flag["mutants"], env["mutants"]);
}

#[test]
fn mutate_diff_output() {
    let luck = corpus("Luckdraw.msol");
    let out = mutforge(&["mutate", path(&luck), "--target", "10", "--diff"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("#0 ")));
    assert!(text.lines().any(|l| l.starts_with("< ")));
    assert!(text.lines().any(|l| l.starts_with("> ")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("attempts:"));
}

#[test]
fn test_subcommand_reports_steps() {
    let out = mutforge(&["test", path(&corpus("Luckdraw.msol")), path(&corpus("Luckdraw.test.json")), "--prefix", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["contract"], "Luckdraw");
    let steps = j["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 4);
    assert_eq!(steps[1]["glr"], 93520);
    assert_eq!(steps[1]["status"], "success");
    let too_long = mutforge(&["test", path(&corpus("Luckdraw.msol")), path(&corpus("Luckdraw.test.json")), "--prefix", "99"], None);
    assert_eq!(too_long.status.code(), Some(1));
}

#[test]
fn score_subcommand() {
    let out = mutforge(
        &["score", path(&corpus("Luckdraw.msol")), path(&corpus("Luckdraw.test.json")), "--target", "10", "--conditions", "tx,ev"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["conditions"], "TxEv");
    assert_eq!(j["viable"], 10);
    assert_eq!(j["verdicts"].as_array().unwrap().len(), 10);
}

#[test]
fn report_writes_each_format() {
    let dir = tempfile::tempdir().unwrap();
    let src = tempfile::tempdir().unwrap();
    for f in ["Token.msol", "Token.test.json"] {
        fs::copy(corpus(f), src.path().join(f)).unwrap();
    }
    for (format, ext) in [("json", "json"), ("csv", "csv"), ("text", "txt")] {
        let out = mutforge(
            &["report", src.path().to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--target", "5", "--format", format],
            None,
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let written = fs::read_to_string(dir.path().join(format!("report.{ext}"))).unwrap();
        assert!(!written.is_empty());
    }
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(j["totals"]["contracts"], 1);
    let bad = mutforge(&["report", src.path().to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--format", "xml"], None);
    assert_eq!(bad.status.code(), Some(1));
    let empty = tempfile::tempdir().unwrap();
    let out = mutforge(&["report", empty.path().to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no contracts"));
}
