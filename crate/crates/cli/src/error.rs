use std::io;
use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] cecp::Error),
    #[error("row {row}, column `{column}`: {message}")]
    Cell {
        /// 1-based data row (the header is not counted).
        row: usize,
        column: String,
        message: String,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("irregular timestamps at row {row}: expected step {expected}, found {found}")]
    IrregularGrid {
        row: usize,
        expected: i64,
        found: i64,
    },
    #[error("asset `{asset}`: {source}")]
    Asset {
        asset: String,
        #[source]
        source: cecp::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("missing prerequisite: {0}")]
    MissingPrerequisite(String),
    #[error("input digest mismatch for {path}: manifest {expected}, file {found}")]
    DigestMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Io { .. } => "io",
            Self::Csv(_) => "csv",
            Self::Json(_) => "json",
            Self::Core(_) | Self::Asset { .. } => "computation",
            Self::Cell { .. } => "cell",
            Self::MissingColumn(_) => "missing_column",
            Self::IrregularGrid { .. } => "irregular_timestamps",
            Self::Input(_) => "input",
            Self::MissingPrerequisite(_) => "missing_prerequisite",
            Self::DigestMismatch { .. } => "digest_mismatch",
        }
    }

    /// Machine-readable form written to stderr by the binary.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            Self::Cell { row, column, .. } => {
                body["row"] = json!(row);
                body["column"] = json!(column);
            }
            Self::MissingColumn(column) => body["column"] = json!(column),
            Self::IrregularGrid { row, .. } => body["row"] = json!(row),
            Self::Asset { asset, .. } => body["asset"] = json!(asset),
            _ => {}
        }
        json!({ "error": body })
    }
}
