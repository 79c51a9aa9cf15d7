#![allow(dead_code)]

use std::path::PathBuf;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data(rel: &str) -> PathBuf {
    repo_root().join("data").join(rel)
}

pub fn golden(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(rel)
}

pub fn docs(rel: &str) -> PathBuf {
    repo_root().join("docs").join(rel)
}
