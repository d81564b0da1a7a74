use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use serde_json::Value;
use tempfile::TempDir;

const SMALL: &[&str] = &["--precision-bits", "1024", "--n-max", "5", "--steps", "2"];

fn akflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_akflow"))
        .args(args)
        .env_remove("AKFLOW_PRECISION_BITS")
        .output()
        .expect("spawn akflow")
}

fn run_ok(args: &[&str]) -> Output {
    let out = akflow(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn with_small<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(SMALL.iter().copied()).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Artifacts {
    dir: TempDir,
}

impl Artifacts {
    fn plan(&self) -> PathBuf {
        self.dir.path().join("plan.json")
    }
    fn stack(&self) -> PathBuf {
        self.dir.path().join("stack.json")
    }
}

/// Plan and stack at 1024 bits, blocks up to 5, two stages.
fn small() -> &'static Artifacts {
    static A: OnceLock<Artifacts> = OnceLock::new();
    A.get_or_init(|| {
        let a = Artifacts { dir: TempDir::new().unwrap() };
        run_ok(&with_small(&["plan", "--out", s(&a.plan())]));
        run_ok(&with_small(&["build", "--plan", s(&a.plan()), "--out", s(&a.stack())]));
        a
    })
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn too_few_blocks_is_a_config_error() {
    let out = akflow(&["--n-max", "3", "plan"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_max"));
}

#[test]
fn precision_too_low_for_the_blocks() {
    let out = akflow(&["--precision-bits", "1024", "--n-max", "6", "plan"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1728"));
}

#[test]
fn precision_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_akflow"))
        .args(["plan"])
        .env("AKFLOW_PRECISION_BITS", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plan_and_build_are_reproducible() {
    let a = small();
    let plan = run_ok(&with_small(&["plan"])).stdout;
    assert_eq!(plan, fs::read(a.plan()).unwrap());
    let stack = run_ok(&with_small(&["build", "--plan", s(&a.plan())])).stdout;
    assert_eq!(stack, fs::read(a.stack()).unwrap());
    let doc = json(&a.stack());
    assert_eq!(doc["stack"]["stages"].as_array().unwrap().len(), 2);
    assert_eq!(doc["stack"]["stages"][1]["q"], 11);
}

#[test]
fn even_modulus_is_an_invariant_failure() {
    let a = small();
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    let text = fs::read_to_string(a.stack()).unwrap().replacen("\"q\": 3,", "\"q\": 4,", 1);
    fs::write(&bad, text).unwrap();
    let out = akflow(&with_small(&["verify", "--plan", s(&a.plan()), "--stack", s(&bad), "--check", "scaling"]));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q_k odd"));
}

#[test]
fn plan_hash_must_match() {
    let a = small();
    let dir = TempDir::new().unwrap();
    let plan = dir.path().join("plan.json");
    // same plan, different bytes
    fs::write(&plan, format!("{}\n", fs::read_to_string(a.plan()).unwrap())).unwrap();
    let out = akflow(&with_small(&["verify", "--plan", s(&plan), "--stack", s(&a.stack()), "--check", "scaling"]));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hash mismatch"));
}

#[test]
fn unknown_check_is_a_config_error() {
    let a = small();
    let out = akflow(&with_small(&["verify", "--plan", s(&a.plan()), "--stack", s(&a.stack()), "--check", "bogus"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_subset_is_deterministic() {
    let a = small();
    let dir = TempDir::new().unwrap();
    let (plan, stack) = (a.plan(), a.stack());
    let mut reports = vec![];
    for name in ["a.json", "b.json"] {
        let r = dir.path().join(name);
        let args = [
            "verify", "--plan", s(&plan), "--stack", s(&stack), "--sweep", "16",
            "--check", "stack-l-jump", "--check", "scaling", "--check", "cantor-structure", "--report", s(&r),
        ];
        run_ok(&with_small(&args));
        reports.push(fs::read(&r).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let v: Value = serde_json::from_slice(&reports[0]).unwrap();
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["cantor-structure", "scaling", "stack-l-jump"]);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["stack_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn cantor_component_at_an_address() {
    let a = small();
    let out = run_ok(&with_small(&["cantor", "--stack", s(&a.stack()), "--address", "01"]));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["address"], "01");
    assert_eq!(v["intervals"].as_array().unwrap().len(), 3);
    assert!(v["lo_hex"].as_str().unwrap().starts_with("+0x"));
    assert_ne!(v["lo_hex"], v["hi_hex"]);
}

#[test]
fn flow_prints_a_jet() {
    let a = small();
    let out = run_ok(&with_small(&["flow", "--stack", s(&a.stack()), "--stage", "2", "--time", "-1/3", "--x", "3/64", "--order", "3"]));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["derivatives_hex"].as_array().unwrap().len(), 4);
    let bad = akflow(&with_small(&["flow", "--stack", s(&a.stack()), "--stage", "5", "--time", "1", "--x", "1/2"]));
    assert_eq!(bad.status.code(), Some(2));
}

fn exponent(hex: &str) -> i64 {
    hex.rsplit_once('p').unwrap().1.parse().unwrap()
}

#[test]
fn plots_are_written() {
    let a = small();
    let dir = TempDir::new().unwrap();
    run_ok(&with_small(&["emit-plots", "--plan", s(&a.plan()), "--stack", s(&a.stack()), "--out", s(dir.path())]));
    for f in ["landscape.csv", "wave.csv", "lf.csv", "intervals.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let stages = json(&a.stack())["stack"]["stages"].as_array().unwrap().clone();
    let mut rdr = csv::Reader::from_path(dir.path().join("wave.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    for (k, stage) in stages.iter().enumerate() {
        let ratio = exponent(stage["v_hex"].as_str().unwrap()) - exponent(stage["u_hex"].as_str().unwrap());
        let top = |tile: &str| {
            rows.iter()
                .filter(|r| r[0] == *(k + 1).to_string() && &r[2] == tile)
                .map(|r| exponent(&r[7]))
                .max()
                .unwrap()
        };
        let gain = top("highland") - top("lowland");
        assert!((gain - ratio).abs() <= 1, "stage {}: 2^{gain} vs 2^{ratio}", k + 1);
    }
}

#[test]
fn landscape_header() {
    let out = run_ok(&["--precision-bits", "1024", "--n-max", "4", "inspect-field", "--per-octave", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x_hex,xi0,D1,D2"));
    assert!(lines.all(|l| l.split(',').count() == 4));
}
