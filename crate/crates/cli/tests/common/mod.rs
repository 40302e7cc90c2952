#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub use testscope_testkit::{fixture, workspace_root};

/// Runs the built binary from the workspace root with a clean config
/// environment.
pub fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

pub fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_testscope"));
    cmd.args(args)
        .current_dir(workspace_root())
        .env_remove("TESTSCOPE_CONFIG")
        .env("SOURCE_DATE_EPOCH", "1700000000");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Analyzes a fixture corpus into `dir/<file>` and returns the bundle path.
pub fn analyze(dir: &Path, corpus: &str, extra: &[&str]) -> PathBuf {
    let out_path = dir.join(format!("{}.bundle.json", corpus.replace('/', "_")));
    let root = format!("fixtures/{corpus}");
    let mut args = vec!["analyze", "--root", &root, "--out", out_path.to_str().unwrap(), "--quiet"];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert_eq!(code(&out), 0, "analyze {corpus}: {}", stderr(&out));
    out_path
}

pub fn manifest(rel: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(rel)).unwrap()).unwrap()
}
