use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: duplicate id `{id}`")]
    DuplicateId { path: PathBuf, line: usize, id: String },

    #[error("{path}:{line}: negative page-view count {value}")]
    NegativeCount {
        path: PathBuf,
        line: usize,
        value: i64,
    },

    #[error("tag `{0}` has an empty body")]
    EmptyTag(String),

    #[error("no triples to rank relationships over")]
    EmptyCorpus,

    #[error("unknown entity `{0}`")]
    UnknownEntity(String),

    #[error("entity `{0}` produced no clues from either knowledge source")]
    EmptyModel(String),

    #[error("entity key sets disagree: {0}")]
    KeyMismatch(String),

    #[error("no tweet clue matches any clue node")]
    NoCandidate,

    #[error("{}", insufficient_data_message(*.fold, *.skipped))]
    InsufficientData { fold: Option<usize>, skipped: usize },

    #[error("tweet `{0}` has no gold entity")]
    MissingGold(String),

    #[error("empty evaluation set: {0}")]
    EmptySet(&'static str),

    #[error("graph was built for type `{graph}`, request asks for `{request}`")]
    TypeMismatch { graph: String, request: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing `{0}` (give --{0} or set it in the config file)")]
    MissingSetting(String),

    #[error("snapshot line {line}: {message}")]
    Snapshot { line: usize, message: String },
}

fn insufficient_data_message(fold: Option<usize>, skipped: usize) -> String {
    let base = format!("no usable training pairs ({skipped} queries skipped)");
    match fold {
        Some(f) => format!("fold {f}: {base}"),
        None => base,
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
