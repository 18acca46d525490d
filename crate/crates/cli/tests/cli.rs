use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dspkit::{Decision, ProblemFile, PsiTrace, Verdict};
use dspkit_cli::{DecideOutput, GenericityOutput, OrbitChainOutput, VerifyOutput};
use dspkit_numeric::{VerificationReport, Witness};
use serde::de::DeserializeOwned;
use serde::Serialize;
use tempfile::TempDir;

const HYPERGEOMETRIC: &str = r#"{"flavor":"additive","n":2,"classes":[
 {"eigenvalues":[{"value":"1","mult":1},{"value":"-1/3","mult":1}]},
 {"eigenvalues":[{"value":"1/5","mult":1},{"value":"-1/7","mult":1}]},
 {"eigenvalues":[{"value":"-1/2","mult":1},{"value":"-47/210","mult":1}]}]}"#;

const RIGID_FAILURE: &str = r#"{"flavor":"additive","n":4,"classes":[
 {"eigenvalues":[{"mult":1},{"mult":1},{"mult":1},{"mult":1}]},
 {"eigenvalues":[{"mult":2},{"mult":2}]},
 {"eigenvalues":[{"mult":2},{"mult":2}]}]}"#;

const SCALARS: &str = r#"{"flavor":"additive","n":2,"classes":[
 {"eigenvalues":[{"value":"1","mult":2}]},
 {"eigenvalues":[{"value":"2","mult":2}]},
 {"eigenvalues":[{"value":"-3","mult":2}]}]}"#;

// d = 2 in the multiplicative flavor is outside every criterion
const MULTIPLICATIVE_PAIRS: &str = r#"{"flavor":"multiplicative","n":4,"classes":[
 {"eigenvalues":[{"mult":2},{"mult":2}]},
 {"eigenvalues":[{"mult":2},{"mult":2}]},
 {"eigenvalues":[{"mult":2},{"mult":2}]}],
 "solver":{"max_restarts":4}}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dspkit(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dspkit"));
    cmd.args(args).env_remove("DSPKIT_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    Run {
        code: status.code().unwrap(),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Parses stdout and checks that the parsed value serializes back to the
/// same bytes.
fn reparse<T: DeserializeOwned + Serialize + PartialEq + std::fmt::Debug>(text: &str) -> T {
    let value: T = serde_json::from_str(text).unwrap();
    let again = serde_json::to_string(&value).unwrap();
    assert_eq!(again, text.trim_end());
    assert_eq!(serde_json::from_str::<T>(&again).unwrap(), value);
    value
}

#[test]
fn decide_hypergeometric() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", HYPERGEOMETRIC);
    let r = dspkit(&["decide", s(&p)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out: DecideOutput = reparse(&r.stdout);
    assert_eq!(out.decision.verdict, Verdict::Solvable);
    assert_eq!(out.decision.trace.stages[1].n, 1);
    assert!(out.eigenvalues.unwrap().classification.generic);
}

#[test]
fn decide_exit_codes() {
    let dir = TempDir::new().unwrap();
    let fails = write(&dir, "f.json", RIGID_FAILURE);
    assert_eq!(dspkit(&["decide", s(&fails)], &[]).code, 1);

    let bad_blocks = write(
        &dir,
        "b.json",
        r#"{"flavor":"additive","n":2,"classes":[{"eigenvalues":[{"mult":2,"blocks":[1]}]},{"eigenvalues":[{"mult":2}]}]}"#,
    );
    let r = dspkit(&["decide", s(&bad_blocks)], &[]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.is_empty() && r.stderr.contains("blocks"));

    let malformed = write(&dir, "m.json", "{\"flavor\": ");
    assert_eq!(dspkit(&["decide", s(&malformed)], &[]).code, 3);
    assert_eq!(dspkit(&["decide", "/nonexistent/problem.json"], &[]).code, 3);

    let nilpotent = write(
        &dir,
        "n.json",
        r#"{"flavor":"additive","n":2,"mode":"any_weak","classes":[
            {"eigenvalues":[{"value":"0","mult":2,"blocks":[2]}]},
            {"eigenvalues":[{"value":"0","mult":2,"blocks":[2]}]},
            {"eigenvalues":[{"value":"0","mult":2,"blocks":[2]}]}]}"#,
    );
    assert_eq!(dspkit(&["decide", s(&nilpotent)], &[]).code, 2);
}

#[test]
fn decide_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "f.json", RIGID_FAILURE);
    let first = dspkit(&["decide", s(&p)], &[]).stdout;
    for threads in ["1", "3"] {
        assert_eq!(dspkit(&["decide", s(&p)], &[("DSPKIT_THREADS", threads)]).stdout, first);
    }
}

#[test]
fn range_flags() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", HYPERGEOMETRIC);
    let full: DecideOutput = reparse(&dspkit(&["decide", s(&p)], &[]).stdout);
    assert_eq!(full.eigenvalues.unwrap().range, dspkit::SRange { min: 1, max: 1 });
    let literal: DecideOutput = reparse(&dspkit(&["decide", s(&p), "--paper-s-range"], &[]).stdout);
    assert_eq!(literal.eigenvalues.unwrap().range, dspkit::SRange::strict(2));
    assert_eq!(dspkit(&["decide", s(&p), "--s-range", "1:5"], &[]).code, 3);
    assert_eq!(dspkit(&["decide", s(&p), "--s-range", "1:1", "--paper-s-range"], &[]).code, 3);
    let r = dspkit(&["decide", s(&p), "--trace"], &[]);
    assert!(r.stderr.contains("stage 1: n = 1"));
}

#[test]
fn realize_and_verify() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", HYPERGEOMETRIC);
    let out = dir.path().join("w.json");
    let r = dspkit(&["realize", s(&p), "--seed", "7", "--out", s(&out)], &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let report: VerificationReport = reparse(&r.stdout);
    assert!(report.residual <= 1e-10);
    assert_eq!(report.algebra_dimension, 4);

    let text = std::fs::read_to_string(&out).unwrap();
    let w: Witness = reparse(&text);
    assert_eq!(w.report, report);

    let v = dspkit(&["verify", s(&out), s(&p)], &[]);
    assert_eq!(v.code, 0, "{}", v.stderr);
    let v: VerifyOutput = reparse(&v.stdout);
    assert!(v.certified);

    // a bare tuple file verifies the same way
    let bare = write(&dir, "t.json", &serde_json::to_string(&w.tuple).unwrap());
    assert_eq!(dspkit(&["verify", s(&bare), s(&p)], &[]).code, 0);

    // classes differing from the tuple's
    let other = write(&dir, "o.json", &HYPERGEOMETRIC.replace("-1/3", "-1/4").replace("-47/210", "-19/60"));
    assert_eq!(dspkit(&["verify", s(&out), s(&other)], &[]).code, 3);
}

#[test]
fn realize_is_reproducible_on_stdout() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", HYPERGEOMETRIC);
    let a = dspkit(&["realize", s(&p), "--seed", "11", "--threads", "1"], &[]);
    let b = dspkit(&["realize", s(&p), "--seed", "11"], &[("DSPKIT_THREADS", "2")]);
    assert_eq!(a.code, 0);
    let _: Witness = reparse(&a.stdout);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn realize_refuses_scalars() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", SCALARS);
    let r = dspkit(&["realize", s(&p)], &[]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
}

#[test]
fn forced_realize_outside_scope() {
    let dir = TempDir::new().unwrap();
    let shape = write(&dir, "shape.json", MULTIPLICATIVE_PAIRS);
    assert_eq!(dspkit(&["decide", s(&shape)], &[]).code, 2);

    let sampled = dspkit(&["sample-generic", s(&shape), "--seed", "5"], &[]);
    assert_eq!(sampled.code, 0, "{}", sampled.stderr);
    let problem: ProblemFile = reparse(&sampled.stdout);
    assert_eq!(problem.solver.as_ref().unwrap().max_restarts, 4);
    let p = write(&dir, "p.json", &sampled.stdout);

    assert_eq!(dspkit(&["realize", s(&p)], &[]).code, 2);
    let forced = dspkit(&["realize", s(&p), "--force"], &[]);
    assert!(forced.code == 0 || forced.code == 1, "{}", forced.stderr);
    if forced.code == 0 {
        let w: Witness = reparse(&forced.stdout);
        assert!(w.report.residual <= 1e-9);
    }
}

#[test]
fn sample_then_check() {
    let dir = TempDir::new().unwrap();
    let shape = write(&dir, "shape.json", RIGID_FAILURE);
    let sampled = dspkit(&["sample-generic", s(&shape), "--seed", "2"], &[]);
    let p = write(&dir, "p.json", &sampled.stdout);
    let r = dspkit(&["check-generic", s(&p)], &[]);
    assert_eq!(r.code, 0);
    let out: GenericityOutput = reparse(&r.stdout);
    assert!(out.violated.is_empty() && out.sum_condition);

    // a pair of eigenvalues summing to zero across two classes
    let resonant = write(
        &dir,
        "r.json",
        r#"{"flavor":"additive","n":2,"classes":[
            {"eigenvalues":[{"value":"1/2","mult":1},{"value":"1/3","mult":1}]},
            {"eigenvalues":[{"value":"-1/2","mult":1},{"value":"1/7","mult":1}]},
            {"eigenvalues":[{"value":"0","mult":1},{"value":"-10/21","mult":1}]}]}"#,
    );
    let r = dspkit(&["check-generic", s(&resonant)], &[]);
    assert_eq!(r.code, 1);
    let out: GenericityOutput = reparse(&r.stdout);
    // the relation and its complement 1/3 + 1/7 − 10/21 = 0
    let choices: Vec<_> = out.violated.iter().map(|w| w.choices.clone()).collect();
    assert_eq!(choices, vec![vec![vec![0, 1]; 3], vec![vec![1, 0]; 3]]);
    assert_eq!(dspkit(&["check-generic", s(&shape)], &[]).code, 3);
}

#[test]
fn orbit_chain() {
    let r = dspkit(&["orbit-chain", "2,1,1,1", "4,1"], &[]);
    assert_eq!(r.code, 0);
    let out: OrbitChainOutput = reparse(&r.stdout);
    assert_eq!(out.path.last().unwrap().parts(), &[4, 1]);
    assert_eq!(out.operations.len() + 1, out.path.len());

    let r = dspkit(&["orbit-chain", "3,3", "4,1,1"], &[]);
    assert_eq!(r.code, 1);
    assert!(!reparse::<OrbitChainOutput>(&r.stdout).comparable);

    assert_eq!(dspkit(&["orbit-chain", "3,1", "4,1"], &[]).code, 3);
    assert_eq!(dspkit(&["orbit-chain", "3,x", "4"], &[]).code, 3);
}

#[test]
fn reduce_and_nilpotent_check() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "f.json", RIGID_FAILURE);
    let r = dspkit(&["reduce", s(&p)], &[]);
    assert_eq!(r.code, 0);
    let trace: PsiTrace = reparse(&r.stdout);
    assert_eq!(trace.final_size(), 3);

    let r = dspkit(&["nilpotent-check", "2,1", "2,1", "2,1", "2,1"], &[]);
    let d: Decision = reparse(&r.stdout);
    assert_eq!(r.code, dspkit_cli::verdict_code(d.verdict));
    assert_eq!(dspkit(&["nilpotent-check", "2,1", "2,2"], &[]).code, 3);
    assert_eq!(dspkit(&["nilpotent-check", "2,1"], &[]).code, 3);
}

#[test]
fn pretty_output_parses_to_the_same_value() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "f.json", RIGID_FAILURE);
    let plain: DecideOutput = serde_json::from_str(&dspkit(&["decide", s(&p)], &[]).stdout).unwrap();
    let pretty = dspkit(&["--pretty", "decide", s(&p)], &[]).stdout;
    assert!(pretty.lines().count() > 1);
    assert_eq!(serde_json::from_str::<DecideOutput>(&pretty).unwrap(), plain);
}

#[test]
fn bad_thread_setting_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "f.json", RIGID_FAILURE);
    assert_eq!(dspkit(&["decide", s(&p), "--threads", "2"], &[("DSPKIT_THREADS", "many")]).code, 3);
}
