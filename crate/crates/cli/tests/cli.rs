//! End-to-end runs of the `semiadv` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_semiadv"));
    c.env("SEMIADV_THREADS", "2");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const RS: &str = r#"
seed = 3

[code]
family = "IRS"
n = 16
k = 4
p = 257
s = 2
"#;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identity_channel_pipeline_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", &format!("{RS}\n[channel]\ne0 = 0\ne = 0\n"));
    let word = dir.path().join("w.txt");
    let noisy = dir.path().join("y.txt");
    let back = dir.path().join("m.txt");
    assert!(run(&["encode", s(&cfg), "--out", s(&word)]).status.success());
    let msg = dir.path().join("w.txt.msg");
    assert!(run(&["corrupt", s(&cfg), "--input", s(&word), "--out", s(&noisy)]).status.success());
    assert_eq!(fs::read(&word).unwrap(), fs::read(&noisy).unwrap());
    assert!(run(&["decode", s(&cfg), "--input", s(&noisy), "--out", s(&back)]).status.success());
    assert_eq!(fs::read(&msg).unwrap(), fs::read(&back).unwrap());

    // the decoded message encodes back to the same word
    let again = dir.path().join("w2.txt");
    assert!(run(&["encode", s(&cfg), "--input", s(&back), "--out", s(&again)]).status.success());
    assert_eq!(fs::read(&word).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn decodes_within_the_radius() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", &format!("{RS}\n[channel]\ne0 = 2\ne = 7\nadversary = \"singleComponent\"\n"));
    let word = dir.path().join("w.txt");
    let noisy = dir.path().join("y.txt");
    let back = dir.path().join("m.txt");
    assert!(run(&["encode", s(&cfg), "--out", s(&word)]).status.success());
    assert!(run(&["corrupt", s(&cfg), "--input", s(&word), "--out", s(&noisy), "--seed", "9"]).status.success());
    assert_ne!(fs::read(&word).unwrap(), fs::read(&noisy).unwrap());
    let pattern: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("y.txt.pattern.json")).unwrap()).unwrap();
    assert_eq!(pattern["random_positions"].as_array().unwrap().len() + pattern["adversarial_writes"].as_array().unwrap().len(), 7);
    let out = run(&["decode", s(&cfg), "--input", s(&noisy), "--out", s(&back)]);
    assert!(out.status.success());
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("m.txt.result.json")).unwrap()).unwrap();
    assert_eq!(result["outcome"], "success");
    assert_eq!(fs::read(dir.path().join("w.txt.msg")).unwrap(), fs::read(&back).unwrap());
}

#[test]
fn malformed_word_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", RS);
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 2\nthree 4\n").unwrap();
    let out = run(&["decode", s(&cfg), "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let broken = config(dir.path(), "broken.toml", "[code]\nfamily = \"RS\"\nn = \n");
    assert_eq!(run(&["encode", s(&broken)]).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "c.toml", RS);
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["decode"]).status.code(), Some(2));
    // decode without an input word
    assert_eq!(run(&["decode", s(&cfg)]).status.code(), Some(2));
    // experiment without a grid
    assert_eq!(run(&["experiment", s(&cfg), "--out", s(&dir.path().join("x"))]).status.code(), Some(2));
    let out = bin().env("SEMIADV_THREADS", "many").args(["encode", s(&cfg)]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{RS}\n[channel]\nadversary = \"randomReplace\"\n\n[experiment]\ntrials = 40\ngrid = {{ points = [[1, 6], [4, 9]], e0 = {{ start = 0, end = 2, step = 2 }}, e = {{ start = 2, end = 4, step = 2 }} }}\n"
    );
    let cfg = config(dir.path(), "c.toml", &body);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&["experiment", s(&cfg), "--out", s(&a)]).status.success());
    let out = bin().env("SEMIADV_THREADS", "1").args(["experiment", s(&cfg), "--out", s(&b)]).output().unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 1 + 2 + 4);
    assert!(lines[0].starts_with("point,e0,e,trials,successes,success_rate,"));
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[7], "true");
    assert!(first[4].parse::<usize>().unwrap() >= 36, "{}", lines[1]);
    assert_eq!(first[5], format!("{}/40", first[4]));
    // (4, 9) exceeds the budget e0 + e + k <= n
    assert_eq!(lines[2].split(',').nth(7), Some("false"));

    // the effective config reproduces the run
    let c = dir.path().join("c");
    assert!(run(&["experiment", s(&dir.path().join("a.toml")), "--out", s(&c)]).status.success());
    assert_eq!(csv, fs::read_to_string(dir.path().join("c.csv")).unwrap());

    // a different seed changes the trials, not the schema
    let d = dir.path().join("d");
    assert!(run(&["experiment", s(&cfg), "--out", s(&d), "--seed", "77"]).status.success());
    assert_eq!(fs::read_to_string(dir.path().join("d.csv")).unwrap().lines().next(), Some(lines[0]));
}

#[test]
fn gssb_and_ballcheck_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "g.toml",
        "seed = 1\n[code]\nfamily = \"RS\"\nn = 12\nk = 4\np = 17\n\n[gssb]\nl = 1\ne0 = 4\ne = 5\nsamples = 3\n\n[channel]\ne0 = 1\ne = 3\n\n[ballcheck]\ntrials = 20\n",
    );
    let out = run(&["gssb", s(&cfg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verified"], true);
    assert!(v["sampled_ball_sizes"].as_array().unwrap().iter().all(|x| x.as_u64().unwrap() >= 2));

    let out = run(&["ballcheck", s(&cfg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["stats"]["trials"], 20);
    assert_eq!(v["stats"]["unique"], 20);
}
