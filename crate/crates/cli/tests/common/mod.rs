#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn qsynth(args: &[&str]) -> Output {
    qsynth_env(args, &[])
}

pub fn qsynth_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qsynth"));
    cmd.args(args).env_remove("QSYNTH_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("failed to launch qsynth")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Parses `residual <x>` from command output.
pub fn residual(out: &Output) -> f64 {
    stdout(out)
        .split_whitespace()
        .skip_while(|w| *w != "residual")
        .nth(1)
        .and_then(|w| w.parse().ok())
        .expect("residual line")
}
