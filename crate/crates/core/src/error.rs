//! Error type shared by every module in the crate.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("transaction collection is empty")]
    EmptyTransactions,

    #[error("formal context is degenerate (needs at least one object and one attribute)")]
    DegenerateContext,

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("brute-force oracle refused: {items} distinct items exceed the limit of {limit}")]
    OracleGuard { items: usize, limit: usize },

    #[error(
        "context has {count} attributes, above the lattice bound of {bound}; \
         filter the corpus with a semantic frame first"
    )]
    AttributeBound { count: usize, bound: usize },

    #[error("frequent family references item {item} absent from the transactions")]
    InconsistentFamily { item: u32 },

    #[error("consequent support is zero; lift is undefined")]
    ZeroConsequentSupport,

    #[error("antecedent and consequent must be disjoint and non-empty")]
    BadRuleParts,

    #[error("series has no defined points")]
    NoDefinedPoints,
}

impl Error {
    pub fn invalid_param(detail: impl Into<String>) -> Self {
        Error::InvalidParam(detail.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }
}
