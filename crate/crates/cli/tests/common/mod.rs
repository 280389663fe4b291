#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub const FIXTURES: &[&str] = &[
    "cycle3.txt",
    "chain3.txt",
    "star_in.txt",
    "star_out.txt",
    "complete4.txt",
    "weighted6.txt",
];

pub fn chei2d<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_chei2d"))
        .args(args)
        .env_remove("CHEI2D_THREADS")
        .output()
        .expect("spawn chei2d")
}

/// Runs the binary and panics with its stderr unless it exits with `code`.
pub fn expect_exit(args: &[&str], code: i32) -> Output {
    let out = chei2d(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "chei2d {}\nstderr: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn read(path: impl AsRef<Path>) -> String {
    let path = path.as_ref();
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Data rows of a whitespace-separated table, skipping `#` lines.
pub fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(str::to_owned).collect())
        .collect()
}

/// Every file in `dir` except the run manifest, sorted by name.
pub fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
