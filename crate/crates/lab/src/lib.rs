//! File formats and the experiment runner for `nambu-core`.
//!
//! - [`matrix_json`]: `{"dim", "re", "im"}` matrix files.
//! - [`descriptor`]: JSON functional descriptors.
//! - [`trajectory_csv`]: diagnostics CSV export.
//! - [`cli`]: the `nambu` command line.

pub mod cli;
pub mod descriptor;
pub mod matrix_json;
pub mod trajectory_csv;

use std::path::PathBuf;

/// Errors from reading or writing artifact files.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("{path}: {invariant} invariant violated: {source}")]
    Invalid {
        path: PathBuf,
        invariant: &'static str,
        source: nambu_core::Error,
    },
    #[error("{path}: CSV: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}
