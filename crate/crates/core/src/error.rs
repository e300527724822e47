use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("empty manifest: {0}")]
    EmptyManifest(PathBuf),

    #[error("{path}:{line}: malformed manifest row: {reason}")]
    MalformedManifest {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}: duplicate text_id \"{text_id}\" on lines {first_line} and {second_line}")]
    DuplicateTextId {
        path: PathBuf,
        text_id: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("no stopword list configured for language \"{0}\"")]
    UnknownLanguage(String),

    #[error("document \"{text_id}\" has {size} token(s); at least {required} required")]
    DocumentTooShort {
        text_id: String,
        size: usize,
        required: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty embedding file: {0}")]
    EmptyEmbeddings(PathBuf),

    #[error("{path}:{line}: expected {expected} vector components, found {found}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}:{line}: {reason}")]
    MalformedEmbeddings {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{0}")]
    Undefined(String),

    #[error("{algorithm} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        algorithm: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
