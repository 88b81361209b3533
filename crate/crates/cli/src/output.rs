//! Writing output files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// CSV with a header row and one labelled row per entry of `rows`.
pub fn csv<L: AsRef<str>, V: std::fmt::Display>(header: &[String], rows: &[(L, Vec<V>)]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for (label, values) in rows {
        out.push_str(label.as_ref());
        for v in values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Header `first,c0,c1,...`.
pub fn header(first: &str, columns: impl IntoIterator<Item = impl ToString>) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain(columns.into_iter().map(|c| c.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let text = csv(
            &header("row", [1, 2]),
            &[("a", vec![0.5, 0.25]), ("b", vec![1.0, 0.0])],
        );
        assert_eq!(text, "row,1,2\na,0.5,0.25\nb,1,0\n");
    }
}
