use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("embedding file is empty")]
    EmptyFile,

    #[error("embedding store contains no entries")]
    EmptyStore,

    #[error("line {line}: expected {expected} vector components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: cannot parse {value:?} as a float")]
    InvalidFloat { line: usize, value: String },

    #[error("entry {entry}: non-finite vector component")]
    NonFiniteComponent { entry: usize },

    #[error("line {line}: malformed entry: {reason}")]
    MalformedEntry { line: usize, reason: String },

    #[error("word2vec header not parseable: {0}")]
    BadHeader(String),

    #[error("word2vec file truncated after {read} of {expected} entries")]
    Truncated { read: usize, expected: usize },

    #[error("word2vec file has {0} unexpected trailing bytes after the last entry")]
    TrailingBytes(usize),

    #[error("sentence has no representable content (all tokens filtered or out of vocabulary)")]
    Unrepresentable,

    #[error("matrix contains non-finite entries")]
    NonFiniteInput,

    #[error("matrix is all zeros")]
    ZeroMatrix,

    #[error("dimension mismatch: {0} vs {1}")]
    SubspaceDimMismatch(usize, usize),

    #[error("average vector has zero norm")]
    ZeroNormAverage,

    #[error("representation does not belong to method {0}")]
    RepresentationMismatch(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("{path}: {input_lines} input lines but {gold_lines} gold lines")]
    LineCountMismatch {
        path: PathBuf,
        input_lines: usize,
        gold_lines: usize,
    },

    #[error("{path} line {line}: {reason}")]
    Dataset {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("unknown {kind} {name:?} (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 1 usage, 2 data/format, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownStrategy { .. } | Error::Config(_) => 1,
            Error::NonFiniteInput
            | Error::ZeroMatrix
            | Error::Numerical(_)
            | Error::UndefinedCorrelation(_)
            | Error::SubspaceDimMismatch(..) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
