use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use basketmit::io::{read_transcripts, sha256_file, write_json, write_transcripts};
use basketmit::pattern::{cnot15_file, PatternFile};
use basketmit::rounds::{RoundKind, Verdict};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_basketmit"));
    c.env_remove("BASKETMIT_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn estimate_commands() {
    let o = run(&["estimate", "--k", "2", "--p", "0", "--pmax", "0.15", "--eps", "0.05", "--tau", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["status"], "done");
    assert_eq!(v["tau"], 0.9);
    assert!(v["eps_max"].as_f64().unwrap() <= 0.05);

    let o = run(&["estimate", "--k", "2", "--p", "0", "--pmax", "0.3", "--eps", "0.05"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout_json(&o)["message"], "p_max ≥ r/k");

    let o = run(&["estimate", "--k", "2", "--p", "0", "--pmax", "0.15", "--n", "5198", "--tau", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout_json(&o)["eps_max"].as_f64().unwrap() <= 0.17 + 0.03);
}

#[test]
fn estimate_trace_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    let o = run(&["estimate", "--k", "2", "--pmax", "0.15", "--n", "3000", "--trace", s(&trace)]);
    assert_eq!(o.status.code(), Some(0));
    let points: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(points.len() > 100);
    assert!(points.iter().all(|p| p["n"] == 3000));
}

#[test]
fn oracle_on_builtin_and_corrupted_patterns() {
    let o = run(&["oracle", "--expect", "cnot"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["correct"], 4);

    let dir = tempfile::tempdir().unwrap();
    let mut f = cnot15_file();
    f.angles[5] = 0;
    let bad = dir.path().join("bad.json");
    write_json(&bad, &f).unwrap();
    let o = run(&["oracle", "--pattern", s(&bad), "--expect", "cnot"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout_json(&o)["correct"].as_u64().unwrap() < 4);
}

#[test]
fn oracle_on_identity_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let id = PatternFile {
        vertices: 1,
        edges: vec![],
        inputs: vec![0],
        outputs: vec![0],
        angles: vec![0],
        flow_order: vec![0],
        flow_successor: Default::default(),
    };
    let path = dir.path().join("id.json");
    write_json(&path, &id).unwrap();
    let o = run(&["oracle", "--pattern", s(&path)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout_json(&o)["correct"], 2);
}

fn noiseless_config(dir: &Path, n_prime: usize) -> PathBuf {
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(data("experiments/cnot_noiseless.json")).unwrap()).unwrap();
    for key in ["pattern", "colouring", "noise_model"] {
        let rel = cfg[key].as_str().unwrap().to_string();
        cfg[key] = Value::from(s(&data("experiments").join(rel)));
    }
    cfg["protocol"]["n_prime"] = n_prime.into();
    let path = dir.join("exp.json");
    write_json(&path, &cfg).unwrap();
    path
}

#[test]
fn run_is_reproducible_and_mitigate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = noiseless_config(dir.path(), 4000);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = run(&["run", "--config", s(&cfg), "--out", s(&a)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("test pass rate 1.000"));
    run(&["run", "--config", s(&cfg), "--out", s(&b)]);
    assert_eq!(
        sha256_file(&a.join("transcripts.jsonl")).unwrap(),
        sha256_file(&b.join("transcripts.jsonl")).unwrap()
    );
    assert_eq!(stdout_json(&o)["sha256"], Value::from(sha256_file(&a.join("transcripts.jsonl")).unwrap()));

    let t = a.join("transcripts.jsonl");
    let m = a.join("manifest.json");
    let first = run(&["mitigate", "--config", s(&cfg), "--transcripts", s(&t), "--manifest", s(&m), "--out", s(&a)]);
    let verdict = std::fs::read(a.join("verdict.json")).unwrap();
    let again = run(&["mitigate", "--config", s(&cfg), "--transcripts", s(&t), "--out", s(&a)]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(verdict, std::fs::read(a.join("verdict.json")).unwrap());

    std::fs::write(&t, b"").unwrap();
    let stale = run(&["mitigate", "--config", s(&cfg), "--transcripts", s(&t), "--manifest", s(&m), "--out", s(&a)]);
    assert_eq!(stale.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&stale.stderr).unwrap();
    assert_eq!(err["status"], "error");
}

#[test]
fn noiseless_run_then_mitigate_returns_true() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = noiseless_config(dir.path(), 20_000);
    run(&["run", "--config", s(&cfg), "--out", s(dir.path())]);
    let o = run(&["mitigate", "--config", s(&cfg), "--transcripts", s(&dir.path().join("transcripts.jsonl")), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["status"], "true");
    assert!(v["confidence"].as_f64().unwrap() >= 0.95);
}

#[test]
fn all_failing_transcripts_abort() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = noiseless_config(dir.path(), 20_000);
    run(&["run", "--config", s(&cfg), "--out", s(dir.path())]);
    let t = dir.path().join("transcripts.jsonl");
    let mut ts = read_transcripts(&t).unwrap();
    for x in ts.iter_mut().filter(|x| x.kind == RoundKind::Test) {
        x.verdict = Verdict::Fail;
    }
    write_transcripts(&t, &ts).unwrap();
    let o = run(&["mitigate", "--config", s(&cfg), "--transcripts", s(&t), "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o);
    assert_eq!(v["status"], "abort");
    assert_eq!(v["abort"]["reason"], "no-baskets");
}

#[test]
fn report_of_all_pass_stream() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = noiseless_config(dir.path(), 3000);
    run(&["run", "--config", s(&cfg), "--out", s(dir.path())]);
    let out = dir.path().join("r");
    let o = run(&["report", "--transcripts", s(&dir.path().join("transcripts.jsonl")), "--n", "1000", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("phi.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3000);
    assert!(rows.iter().all(|r| r.ends_with(",0,1")));
    let svg = std::fs::read_to_string(out.join("phi.svg")).unwrap();
    assert!(svg.contains("class=\"threshold\""));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = noiseless_config(dir.path(), 500);
    let env_out = dir.path().join("env");
    let o = bin().args(["run", "--config", s(&cfg)]).env("BASKETMIT_OUT", &env_out).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_out.join("transcripts.jsonl").exists());
}

#[test]
fn invalid_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"pattern": "missing.json"}"#).unwrap();
    let o = run(&["run", "--config", s(&path)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn shipped_experiment_configs_load() {
    for name in ["cnot_fluctuating", "cnot_constant", "cnot_noiseless"] {
        basketmit::io::Experiment::load(&data(&format!("experiments/{name}.json"))).unwrap();
    }
}
