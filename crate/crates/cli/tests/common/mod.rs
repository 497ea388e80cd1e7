#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_techspace"));
    c.env_remove("TECHSPACE_THREADS").env("RUST_LOG", "error");
    c
}

/// Runs `techspace <cmd> --input <input> --out <out> [extra..]`.
pub fn run(cmd: &str, input: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg(cmd)
        .arg("--input")
        .arg(input)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .expect("spawn techspace")
}

pub fn run_ok(cmd: &str, input: &Path, out: &Path, extra: &[&str]) -> Output {
    let o = run(cmd, input, out, extra);
    assert!(
        o.status.success(),
        "techspace {cmd} failed: {}\n{}",
        o.status,
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

/// Every file below `root`, keyed by relative path.
pub fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub window: String,
    pub scope: String,
    pub axis: String,
    pub label: String,
    pub metric: String,
    pub iteration: String,
    pub value: String,
}

pub fn metric_rows(path: &Path) -> Vec<MetricRow> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            MetricRow {
                window: rec[0].to_string(),
                scope: rec[1].to_string(),
                axis: rec[2].to_string(),
                label: rec[3].to_string(),
                metric: rec[4].to_string(),
                iteration: rec[5].to_string(),
                value: rec[6].to_string(),
            }
        })
        .collect()
}

/// Long-format matrix CSV as a map of (entity, technology) to value.
pub fn long_matrix(path: &Path) -> BTreeMap<(String, String), f64> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            ((rec[0].to_string(), rec[1].to_string()), rec[2].parse().unwrap())
        })
        .collect()
}
