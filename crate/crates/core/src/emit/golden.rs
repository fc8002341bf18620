use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::EmittedSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoldenMode {
    /// Compare against the existing file.
    Check,
    /// Write the emitted text, replacing any existing file.
    Record,
}

impl GoldenMode {
    /// `Record` when `UPDATE_GOLDEN` is set to a non-empty value other than `0`.
    pub fn from_env() -> Self {
        match std::env::var("UPDATE_GOLDEN") {
            Ok(v) if !v.is_empty() && v != "0" => GoldenMode::Record,
            _ => GoldenMode::Check,
        }
    }
}

#[derive(Debug, Error)]
pub enum GoldenError {
    #[error("golden file {0} does not exist (rerun with UPDATE_GOLDEN=1 to record it)")]
    MissingGolden(PathBuf),
    #[error("{path}:{line}: expected {expected:?}, emitted {found:?}")]
    Mismatch { path: PathBuf, line: usize, expected: String, found: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Byte-exact comparison of emitted text with a golden file. Reports the
/// first differing line (1-based); a missing trailing line shows as `""`.
pub fn golden_check(emitted: &EmittedSource, path: &Path, mode: GoldenMode) -> Result<(), GoldenError> {
    let io_err = |source| GoldenError::Io { path: path.to_path_buf(), source };
    if mode == GoldenMode::Record {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        return fs::write(path, &emitted.text).map_err(io_err);
    }
    let expected = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(GoldenError::MissingGolden(path.to_path_buf())),
        Err(e) => return Err(io_err(e)),
    };
    if expected == emitted.text {
        return Ok(());
    }
    let mut want = expected.split_inclusive('\n');
    let mut got = emitted.text.split_inclusive('\n');
    let mut line = 1;
    loop {
        match (want.next(), got.next()) {
            (Some(a), Some(b)) if a == b => line += 1,
            (a, b) => {
                return Err(GoldenError::Mismatch {
                    path: path.to_path_buf(),
                    line,
                    expected: a.unwrap_or("").to_string(),
                    found: b.unwrap_or("").to_string(),
                })
            }
        }
    }
}
