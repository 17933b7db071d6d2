#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(format!("{name}.json"))
}

/// Runs the `dmgraph` binary with `args`.
pub fn dmgraph<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_dmgraph")).args(args).output().expect("binary runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Noise and grid flags for the standard 96x96 setting.
pub fn standard_flags() -> Vec<String> {
    "--omega 3 --beta1 10 --beta2 4 --nu 1 --nx 96 --ny 96".split(' ').map(String::from).collect()
}

pub fn s(p: &Path) -> String {
    p.to_str().expect("utf-8 path").to_string()
}
