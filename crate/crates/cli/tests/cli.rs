use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn spf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spf")).args(args).output().expect("spf runs")
}

fn ok(args: &[&str]) -> Output {
    let out = spf(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Worked-example state and its pattern file at the default budget.
fn worked_example(dir: &tempfile::TempDir) -> (PathBuf, PathBuf) {
    let state = path(dir, "state.json");
    let patterns = path(dir, "patterns.json");
    ok(&["build", "--kind", "chains", "--dims", "3x3", "--out", s(&state)]);
    ok(&["patterns", "--state", s(&state), "--out", s(&patterns)]);
    (state, patterns)
}

#[test]
fn outputs_carry_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let (state, patterns) = worked_example(&dir);
    for file in [&state, &patterns] {
        let meta = &json(file)["meta"];
        assert_eq!(meta["schema"], 1);
        assert_eq!(meta["layout_version"], 1);
        assert_eq!(meta["tool_version"], env!("CARGO_PKG_VERSION"));
        assert!(meta["config"].is_object());
        assert!(meta["seed"].is_u64());
    }
    let p = json(&patterns);
    assert_eq!(p["search"]["max_weight"], 9);
    let weights: Vec<usize> =
        p["patterns"].as_array().unwrap().iter().map(|q| q["measurements"].as_object().unwrap().len()).collect();
    assert!(weights.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(weights[0], 6);
}

#[test]
fn simulate_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let (_, patterns) = worked_example(&dir);
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "4", "1"].iter().enumerate() {
        let out = path(&dir, &format!("run{i}.csv"));
        ok(&[
            "--jobs", jobs, "simulate", "--patterns", s(&patterns), "--mode", "unheralded", "--loss", "0:0.5:0.1",
            "--trials", "2000", "--seed", "7", "--out", s(&out),
        ]);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {\"schema\":1"));
    assert!(lines.next().unwrap().starts_with("channel_kind,dims,layout_version,mode,strategy,p_loss"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn tolerance_on_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let (_, patterns) = worked_example(&dir);
    let report = path(&dir, "tol.json");
    ok(&["tolerance", "--patterns", s(&patterns), "--out", s(&report)]);
    let r = json(&report);
    assert_eq!(r["total"], 60);
    assert_eq!(r["max_size"], 4);

    let gpf = path(&dir, "gpf.json");
    let (state, _) = worked_example(&dir);
    ok(&["gpf", "--state", s(&state), "--out", s(&gpf)]);
    let out = ok(&["tolerance", "--patterns", s(&gpf)]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["max_size"], 2);
}

#[test]
fn verify_certifies_emitted_patterns() {
    let dir = tempfile::tempdir().unwrap();
    let state = path(&dir, "square.json");
    let patterns = path(&dir, "square_patterns.json");
    let report = path(&dir, "verify.json");
    ok(&["build", "--kind", "square", "--dims", "2x3", "--out", s(&state)]);
    ok(&["patterns", "--state", s(&state), "--extra-weight", "1", "--max-combo-size", "auto", "--out", s(&patterns)]);
    ok(&["verify", "--state", s(&state), "--patterns", s(&patterns), "--out", s(&report)]);
    let r = json(&report);
    assert_eq!(r["all_certified"], true);
    assert!(r["total"].as_u64().unwrap() > 0);
    assert_eq!(r["certified"], r["total"]);
}

#[test]
fn sweep_reports_crossings() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "sweep.csv");
    let report = path(&dir, "sweep.json");
    ok(&[
        "sweep", "--kind", "square", "--sizes", "2,3", "--extra-weight", "1", "--loss", "0:0.4:0.2", "--trials", "200",
        "--out", s(&csv), "--report", s(&report),
    ]);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2 + 6);
    let r = json(&report);
    assert_eq!(r["crossings"].as_array().unwrap().len(), 1);
    assert_eq!(r["meta"]["schema"], 1);
}

#[test]
fn bench_writes_one_row_per_graph() {
    let out = ok(&["bench", "--random-graphs", "n=5..6", "--edges", "auto", "--trials", "2", "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "nodes,edges,trial,graph_seed,build_ms,pattern_ms,nontrivial,min_weight,patterns");
    assert_eq!(rows.len(), 1 + 2 * (2 + 3));
}

#[test]
fn errors_are_json_and_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "never.json");
    let r = spf(&["build", "--kind", "pentagonal", "--dims", "3", "--out", s(&out)]);
    assert!(!r.status.success());
    let err: Value = serde_json::from_slice(&r.stderr).unwrap();
    assert_eq!(err["schema"], 1);
    assert_eq!(err["error"]["kind"], "core.InvalidChannel");
    assert!(!out.exists());

    let r = spf(&["simulate", "--patterns", s(&path(&dir, "missing.json"))]);
    assert_eq!(r.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&r.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");

    let (_, patterns) = worked_example(&dir);
    let r = spf(&["simulate", "--patterns", s(&patterns), "--loss", "0.5,0.1", "--out", s(&out)]);
    assert!(!r.status.success());
    assert!(!out.exists());

    let r = spf(&["patterns", "--state", s(&patterns)]);
    assert!(!r.status.success());

    let r = spf(&["build", "--kind", "square", "--dims", "2", "--max-combo-size", "lots"]);
    assert_eq!(r.status.code(), Some(2));

    let r = spf(&["frobnicate"]);
    assert_eq!(r.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&r.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}
