use thiserror::Error;

/// Library-wide error type.
///
/// Variants are grouped by how the CLI maps them to exit codes: everything
/// except `Assertion` is an input/usage problem (exit 1); `Assertion` means a
/// mathematical invariant the library promises to check did not hold for the
/// given data (exit 2).
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed expression source; `offset` is a byte offset into the input.
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },

    /// Expression evaluated to a non-finite value or hit a domain error.
    #[error("evaluation error in `{subtree}`: {msg}")]
    Eval { subtree: String, msg: String },

    /// Bad argument to a constructor or operation (empty grid, bad ladder,
    /// misaligned samples, invalid weight parameters, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A weight evaluated outside its contract (non-finite or below 1).
    #[error("weight range error: {0}")]
    WeightRange(String),

    /// Not enough data to run the requested estimate (shells, tail points,
    /// graph depth, fit points, ...).
    #[error("insufficient data: {0}")]
    Insufficient(String),

    /// Root/bracket searches that failed to find what the contract promises.
    #[error("no root: {0}")]
    NoRoot(String),

    /// A checked mathematical invariant failed on the supplied data.
    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {msg}")]
    Csv { path: String, msg: String },

    #[error("json error in {path}: {msg}")]
    Json { path: String, msg: String },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn insufficient(msg: impl Into<String>) -> Self {
        Error::Insufficient(msg.into())
    }

    pub fn assertion(msg: impl Into<String>) -> Self {
        Error::Assertion(msg.into())
    }

    /// Exit code the CLI should use for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Assertion(_) => 2,
            _ => 1,
        }
    }

    /// Short machine-parseable kind tag, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Eval { .. } => "eval",
            Error::Input(_) => "input",
            Error::WeightRange(_) => "weight-range",
            Error::Insufficient(_) => "insufficient",
            Error::NoRoot(_) => "no-root",
            Error::Assertion(_) => "assertion",
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::Json { .. } => "json",
        }
    }
}
