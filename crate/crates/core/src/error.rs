use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by corpus loading, configuration and the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}:{line}: malformed record, field `{field}`: {reason}")]
    Malformed {
        file: PathBuf,
        line: usize,
        field: String,
        reason: String,
    },

    #[error("{file}:{line}: duplicate paper_id `{paper_id}`")]
    DuplicatePaper {
        file: PathBuf,
        line: usize,
        paper_id: String,
    },

    #[error("duplicate journal_id `{0}`")]
    DuplicateJournal(String),

    #[error("unknown {kind} `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("year {0} is not present in the normalization table")]
    YearNotInTable(i32),

    #[error("pagerank did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage `{stage}` output is missing: {path}")]
    MissingStageOutput { stage: String, path: PathBuf },

    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
