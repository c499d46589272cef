//! End-to-end tests of the command-line interface: they run the compiled
//! binary against instance files and check the emitted JSON and exit codes.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use invmilp::io::{parse_result, RunResult};

const DESK: &str = "\
# desk instance
dim n 2
ints r 2
bound 1 0 3
bound 2 0 1
estimate 2 -1
target 0 3
norm linf
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_invmilp"))
}

fn write_desk(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("desk.inst");
    std::fs::write(&path, DESK).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_result(out: &Output) -> RunResult {
    parse_result(&String::from_utf8_lossy(&out.stdout)).expect("valid result JSON")
}

#[test]
fn solve_inverse_emits_exact_trace() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let out = run(&["solve-inverse", "--instance", inst.to_str().unwrap()]);
    assert!(out.status.success());
    let r = stdout_result(&out);
    assert_eq!(r.theta_star.as_deref(), Some("8/5"));
    assert_eq!(r.d_star.as_deref(), Some(&["2/5".to_string(), "3/5".to_string()][..]));
    let rows = r.iterations.unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].d_k, ["2", "-1"]);
    assert_eq!(rows[0].x_k.as_deref(), Some(&["3".to_string(), "0".to_string()][..]));
    assert_eq!(rows[0].norm_c_minus_d, "0");
    assert!(rows[0].e_k.is_empty());
    assert_eq!(rows[1].d_k, ["1/2", "1/2"]);
    assert_eq!(rows[1].e_k, vec![vec!["3", "0"]]);
    assert_eq!(rows[1].norm_c_minus_d, "3/2");
    assert_eq!(rows[2].d_k, ["2/5", "3/5"]);
    assert_eq!(rows[2].e_k, vec![vec!["3", "0"], vec!["3", "1"]]);
    assert_eq!(rows[2].norm_c_minus_d, "8/5");
}

#[test]
fn output_is_byte_deterministic() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let a = run(&["solve-inverse", "--instance", inst.to_str().unwrap()]);
    let b = run(&["solve-inverse", "--instance", inst.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn stdin_instance() {
    let mut child = bin()
        .args(["solve-inverse", "--instance", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(DESK.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert_eq!(stdout_result(&out).theta_star.as_deref(), Some("8/5"));
}

#[test]
fn trace_file_is_written() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let trace = dir.join("trace.json");
    let out = run(&[
        "solve-inverse",
        "--instance",
        inst.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["iterations"].as_array().unwrap().len(), 3);
    assert_eq!(doc["norm"], "linf");
}

#[test]
fn norm_override_changes_the_answer() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let out = run(&["solve-inverse", "--instance", inst.to_str().unwrap(), "--norm", "l1"]);
    assert!(out.status.success());
    let r = stdout_result(&out);
    assert_eq!(r.norm.as_deref(), Some("l1"));
    // l1 distance from c to the feasible cone is 3 on this instance
    assert_eq!(r.theta_star.as_deref(), Some("3"));
}

#[test]
fn solve_forward_with_explicit_objective() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let out = run(&["solve-forward", "--instance", inst.to_str().unwrap(), "--d", "1/2 1/2"]);
    assert!(out.status.success());
    let r = stdout_result(&out);
    assert_eq!(r.status.as_deref(), Some("optimal"));
    assert_eq!(r.value.as_deref(), Some("2"));
    assert_eq!(r.argmax.as_deref(), Some(&["3".to_string(), "1".to_string()][..]));
}

#[test]
fn decide_exit_codes() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let path = inst.to_str().unwrap();
    // YES -> 0
    let out = run(&["decide", "impvp", "--value", "8/5", "--instance", path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_result(&out).answer.as_deref(), Some("YES"));
    // NO -> 1
    let out = run(&["decide", "impvp", "--value", "3/2", "--instance", path]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_result(&out).answer.as_deref(), Some("NO"));
    // forward problems use the estimate by default
    let out = run(&["decide", "movp", "--value", "6", "--instance", path]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["decide", "mdvp", "--value", "11/2", "--instance", path]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reduce_commands() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let path = inst.to_str().unwrap();
    let out = run(&["reduce", "mdvp-impvp", "--alpha", "6", "--instance", path]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_result(&out);
    assert_eq!(r.answer.as_deref(), Some("YES"));
    let red = r.reduction.unwrap();
    assert_eq!(red.x_target, ["12/5", "-6/5"]);
    assert_eq!(red.gamma_out, "0");

    let out = run(&["reduce", "mpvp-imdvp", "--alpha", "7", "--instance", path]);
    assert_eq!(out.status.code(), Some(1));
    let r = stdout_result(&out);
    assert_eq!(r.answer.as_deref(), Some("NO"));
    let red = r.reduction.unwrap();
    assert_eq!(red.nu, 9);
    assert_eq!(red.epsilon, "1/524288"); // 2^-19
}

#[test]
fn certificate_build_and_verify_round_trip() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let path = inst.to_str().unwrap();
    let out = run(&["certificate", "build", "--value", "1", "--instance", path]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_result(&out);
    let cert = r.certificate.expect("gamma < theta* certifies");
    assert_eq!(cert.claim, "impvp-no");

    let cert_path = dir.join("cert.json");
    std::fs::write(&cert_path, serde_json::to_string_pretty(&cert).unwrap()).unwrap();
    let out = run(&[
        "certificate",
        "verify",
        "--certificate",
        cert_path.to_str().unwrap(),
        "--instance",
        path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_result(&out).certificate_valid, Some(true));

    // corrupt a weight: verification fails with exit 1
    let mut broken = cert;
    broken.weights[0] = "1/3".into();
    std::fs::write(&cert_path, serde_json::to_string_pretty(&broken).unwrap()).unwrap();
    let out = run(&[
        "certificate",
        "verify",
        "--certificate",
        cert_path.to_str().unwrap(),
        "--instance",
        path,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_result(&out).certificate_valid, Some(false));

    // above theta* there is nothing to build
    let out = run(&["certificate", "build", "--value", "17/10", "--instance", path]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_result(&out);
    assert!(r.certificate.is_none());
    assert_eq!(r.outcome.as_deref(), Some("no-certificate"));
}

#[test]
fn enumerate_lists_points_and_hull() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let out = run(&["enumerate", "--instance", inst.to_str().unwrap()]);
    assert!(out.status.success());
    let r = stdout_result(&out);
    assert_eq!(r.points.unwrap().len(), 8);
    let hull = r.hull_vertices.unwrap();
    assert_eq!(
        hull,
        vec![vec!["0", "0"], vec!["0", "1"], vec!["0", "3"], vec!["3", "0"], vec!["3", "1"],]
    );
    assert_eq!(r.vertex_complexity, Some(9));
}

#[test]
fn separate_emits_a_violated_valid_cut() {
    let dir = tempdir();
    let inst = write_desk(&dir);
    let out = run(&["separate", "--instance", inst.to_str().unwrap()]);
    assert!(out.status.success());
    let sep = stdout_result(&out).separation.unwrap();
    assert_eq!(sep.kind, "cut");
    assert!(sep.d.is_some() && sep.beta.is_some());
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempdir();
    let path = dir.join("bad.inst");
    std::fs::write(&path, "dim n 1\nestimate 1/0\n").unwrap();
    let out = run(&["solve-inverse", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("zero denominator"), "stderr: {err}");

    // clap usage errors are also 2
    let out = run(&["decide"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_3() {
    let dir = tempdir();
    // zero estimate
    let path = dir.join("zero.inst");
    std::fs::write(&path, "dim n 1\nints r 1\nbound 1 0 1\nestimate 0\ntarget 0\n").unwrap();
    let out = run(&["solve-inverse", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // missing target
    let path = dir.join("notarget.inst");
    std::fs::write(&path, "dim n 1\nints r 1\nbound 1 0 1\nestimate 1\n").unwrap();
    let out = run(&["solve-inverse", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("target required"));

    // empty feasible set
    let path = dir.join("empty.inst");
    std::fs::write(&path, "dim n 1\nints r 1\nrow 1 <= -1\nbound 1 0 1\nestimate 1\ntarget 0\n")
        .unwrap();
    let out = run(&["solve-inverse", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "invmilp-cli-{}-{}",
        std::process::id(),
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).unwrap().as_nanos()
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
