#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const THREE_LEVEL_STATE: &str =
    r#"{"dim":3,"re":[[0.25,0,0.25],[0,0.5,0],[0.25,0,0.25]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#;

pub const DIAGONAL_STATE: &str =
    r#"{"dim":3,"re":[[0.2,0,0],[0,0.5,0],[0,0,0.3]],"im":[[0,0,0],[0,0,0],[0,0,0]]}"#;

/// The two-operator three-level channel at `b = 1`.
pub const KRAUS_PAIR: &str = r#"{"dim":3,"operators":[
  {"dim":3,"re":[[0,1,0],[0,0,0],[0,0,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]},
  {"dim":3,"re":[[1,0,0],[0,0,1],[0,0,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]}]}"#;

/// A single unitary that mixes |0> and |1>: trace preserving but not incoherent.
pub const HADAMARD_CHANNEL: &str = r#"{"dim":3,"operators":[
  {"dim":3,"re":[[0.7071067811865476,0.7071067811865476,0],[0.7071067811865476,-0.7071067811865476,0],[0,0,1]],"im":[[0,0,0],[0,0,0],[0,0,0]]}]}"#;

pub const QUBIT_PLUS: &str = r#"{"dim":2,"re":[[0.5,0.5],[0.5,0.5]],"im":[[0,0],[0,0]]}"#;

pub const ENSEMBLE: &str = r#"[
  {"weight":0.5,"state":{"dim":2,"re":[[0.5,0.5],[0.5,0.5]],"im":[[0,0],[0,0]]}},
  {"weight":0.5,"state":{"dim":2,"re":[[0.5,0],[0,0.5]],"im":[[0,0],[0,0]]}}]"#;

pub fn write_fixture(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

pub fn coherence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coherence"))
        .args(args)
        .env_remove("COHERENCE_LOG")
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn json_lines(out: &Output) -> Vec<serde_json::Value> {
    stdout(out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}
