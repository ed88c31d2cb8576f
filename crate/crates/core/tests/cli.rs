use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linemin"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("LINEMIN_CACHE_DIR").output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pg_pipes_into_eps() {
    let pg = run(&["pg", "3", "2"]);
    assert!(pg.status.success());
    let eps = run_stdin(&["eps"], &pg.stdout);
    assert_eq!(eps.status.code(), Some(0));
    assert_eq!(stdout(&eps).trim(), "7");
}

#[test]
fn check_kung_matches_golden_report() {
    let out = run(&["check-kung", "--catalog", "pg3q2-restrictions", "--l", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = include_str!("golden/check-kung-pg3q2-restrictions.json");
    assert_eq!(stdout(&out), golden);
    let report: Value = serde_json::from_str(golden).unwrap();
    for key in ["version", "command", "params", "records", "summary", "timing"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["summary"]["extremal"].as_array().unwrap().len(), 1);
    assert!(report["summary"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn find_minor_certificate_replays() {
    let input = data("fano-plus-point.mat");
    let out = run(&["find-minor", "--target", "u2,5", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["found"], true);
    assert_eq!(v["certificate"]["type"], "MinorEmbedding");

    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    std::fs::write(&cert, v["certificate"].to_string()).unwrap();
    let verified = run(&["verify-cert", "-i", input.to_str().unwrap(), "--cert", cert.to_str().unwrap()]);
    assert_eq!(verified.status.code(), Some(0));
    let wrong = run(&["verify-cert", "--named", "u2,8", "--cert", cert.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["find-minor", "--named", "fano", "--target", "u2,4"]).status.code(), Some(1));
    assert_eq!(run(&["max-line", "--named", "pg4q3", "--budget", "10"]).status.code(), Some(3));
    assert_eq!(run(&["check-kung", "--catalog", "named:pg4q2", "--l", "2", "--budget", "1"]).status.code(), Some(3));
    assert_eq!(run(&["eps", "--named", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["check-kung", "--catalog", "pg3q2-all", "--l", "1"]).status.code(), Some(2));
}

#[test]
fn matrix_errors_are_positioned() {
    let out = run_stdin(&["eps"], b"2 2 3\n1 0 1\n0 x 1\n");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("<stdin>:3:3"), "{err}");
}

#[test]
fn matroid_json_input() {
    let out = run_stdin(&["eps", "--format", "text"], br#"{"kind": "uniform", "rank": 2, "size": 6}"#);
    assert_eq!(stdout(&out).trim(), "6");
}

#[test]
fn procedures_from_the_command_line() {
    let out = run(&["round", "--named", "u23+u23"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["round"], false);

    let out = run(&["round-dense", "--named", "two-lines-rank-3", "--q", "4", "--t", "1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["outcome"], "round_dense");
    assert_eq!(v["points"], 11);

    let out = run(&["round-restrict", "--named", "u23+u23", "--policy", "1,1,1,1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["points"], 3);

    let out = run(&["connectivity", "--named", "fano", "--a", "0,1,2", "--b", "3,4", "--format", "text"]);
    assert!(out.status.success());

    let out = run(&["skew-dense", "--named", "pg4q2", "--a", "1,2,3,4,5,6,7,8,9,10,11,12,13", "--b", "14", "--lambda", "4/5", "--q", "2", "--l", "2", "--k", "1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rank"], 3);

    let input = data("fano-plus-point.mat");
    let out = run(&["max-line", "-i", input.to_str().unwrap(), "--format", "text"]);
    assert_eq!(stdout(&out).trim(), "5");
}

#[test]
fn report_formats() {
    let csv = run(&["density-profile", "--catalog", "named:pg3q3", "--l", "3", "--format", "csv"]);
    assert_eq!(stdout(&csv), "rank,max_epsilon,theta,excess,members\n3,13,13,0,pg3q3\n");
    let text = run(&["extremal-census", "--catalog", "named:pg4q3", "--l", "3", "--format", "text"]);
    assert!(stdout(&text).contains("extremal pg4q3"));
}

#[test]
fn config_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("linemin.toml");
    std::fs::write(
        &config,
        "format = \"text\"\n[catalog.tiny]\ngenerator = \"named\"\nnames = [\"fano\", \"u2,3\"]\n",
    )
    .unwrap();
    let cache = dir.path().join("cache");
    let args = ["--config", config.to_str().unwrap(), "--cache-dir", cache.to_str().unwrap()];

    let list = run(&[&args[..], &["catalog", "list"]].concat());
    assert!(stdout(&list).lines().any(|l| l == "tiny"));
    let built = run(&[&args[..], &["catalog", "build", "tiny"]].concat());
    assert!(built.status.success(), "{}", String::from_utf8_lossy(&built.stderr));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let kung = run(&[&args[..], &["check-kung", "--catalog", "tiny", "--l", "2"]].concat());
    assert!(stdout(&kung).starts_with("check-kung: 2 members, 2 passed"));

    let env = bin()
        .args(["catalog", "build", "named:fano"])
        .env("LINEMIN_CACHE_DIR", dir.path().join("env-cache"))
        .output()
        .unwrap();
    assert!(env.status.success());
    assert!(dir.path().join("env-cache").read_dir().unwrap().count() == 1);

    std::fs::write(&config, "bugdet = 3\n").unwrap();
    let bad = run(&["--config", config.to_str().unwrap(), "catalog", "list"]);
    assert_eq!(bad.status.code(), Some(2));
}
