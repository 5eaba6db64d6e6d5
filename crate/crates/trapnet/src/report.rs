//! CSV and JSON output.
//!
//! CSV files start with one `#` line of run metadata, then a header row.
//! Floats use Rust's shortest round-trip formatting.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub struct Csv {
    text: String,
}

impl Csv {
    /// `meta` is a list of `key=value` pairs for the comment line.
    pub fn new(meta: &[(&str, String)], kappa: f64, header: &[&str]) -> Self {
        let mut text = String::from("#");
        for (k, v) in meta {
            let _ = write!(text, " {k}={v}");
        }
        let _ = writeln!(text, " (energies and times in units hbar=1, kappa={kappa})");
        text.push_str(&header.join(","));
        text.push('\n');
        Csv { text }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// `dir/stem.suffix` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&[("N0", "2".into())], 1.0, &["a", "b"]);
        csv.row(&["1".into(), "0.5".into()]);
        let s = csv.into_string();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# N0=2 "));
        assert!(lines[0].contains("kappa=1"));
        assert_eq!(lines[1..], ["a,b", "1,0.5"]);
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(sibling(Path::new("out/t.csv"), "zeros.json"), PathBuf::from("out/t.zeros.json"));
        assert_eq!(sibling(Path::new("t"), "L6.csv"), PathBuf::from("t.L6.csv"));
    }
}
