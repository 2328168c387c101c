use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zipstrata"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_cfg(cmd: &str, cfg: &str, extra: &[&str]) -> Output {
    let path = config(cfg);
    let mut args = vec![cmd, "--config", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zipstrata-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn hasse_dot_has_twelve_nodes() {
    let o = run_cfg("hasse", "c3.json", &["--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("digraph"));
    assert_eq!(s.lines().filter(|l| l.contains("[label=")).count(), 12);
    assert_eq!(s.lines().filter(|l| l.contains("->")).count(), 16);
}

#[test]
fn regular_gl4_has_24_strata() {
    let o = run_cfg("strata", "gl4_regular.json", &[]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let n = v["result"]["strata"]
        .as_array()
        .or_else(|| v["result"]["nodes"].as_array())
        .map(|a| a.len());
    assert_eq!(n, Some(24), "{v}");
}

#[test]
fn infeasible_cone_exits_3() {
    let o = run_cfg("cone", "c3.json", &[]);
    assert_eq!(o.status.code(), Some(3));
    let v = json(&o);
    assert_eq!(v["result"]["cones"][0]["feasible"], Value::Bool(false));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(run(&["strata"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let bad = scratch("bad.json");
    std::fs::write(
        &bad,
        r#"{"schema": 1, "group": {"preset": "C3"}, "p": 4, "I": [1]}"#,
    )
    .unwrap();
    let o = run(&["strata", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    std::fs::write(
        &bad,
        r#"{"schema": 1, "group": {"preset": "C3"}, "p": 2, "I": [1], "bogus": 0}"#,
    )
    .unwrap();
    assert_eq!(
        run(&["strata", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn golden_and_mutations() {
    assert_eq!(run(&["golden"]).status.code(), Some(0));
    assert_eq!(
        run(&["golden", "--mutate", "transposed-closure"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["golden", "--mutate", "reading=verbatim"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn output_is_byte_deterministic() {
    for cmd in ["describe", "strata", "n-alpha", "purity"] {
        let a = run_cfg(cmd, "c3.json", &["--format", "text"]);
        let b = run_cfg(cmd, "c3.json", &["--format", "text"]);
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn out_file_matches_stdout() {
    let path = scratch("strata.json");
    let o = run_cfg("strata", "c3.json", &["--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let direct = run_cfg("strata", "c3.json", &[]);
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn scan_is_worker_independent() {
    let one = run_cfg("scan", "c3.json", &["--workers", "1"]);
    let four = run_cfg("scan", "c3.json", &["--workers", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let v = json(&one);
    assert_eq!(v["result"]["cells"].as_array().unwrap().len(), 3);
    assert_eq!(v["result"]["first_uniform_prime"]["{1,3}"], Value::from(3));
}

#[test]
fn scan_with_no_primes_is_empty() {
    let cfg = scratch("noprimes.json");
    std::fs::write(
        &cfg,
        r#"{"schema": 1, "group": {"preset": "C3"}, "p": 2, "I": [1, 3], "primes": []}"#,
    )
    .unwrap();
    let o = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    assert_eq!(v["result"]["cells"], Value::Array(vec![]));
}
