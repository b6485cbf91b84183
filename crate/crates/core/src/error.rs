use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed triple on line {0}")]
    MalformedLine(usize),
    #[error("too many distinct edge labels: {0} (at most 64 are supported)")]
    TooManyLabels(usize),
    #[error("graph contains no triples")]
    EmptyGraph,
    #[error("vertex is not a schema class: {0}")]
    UnknownClass(String),

    #[error("constraint syntax error: {0}")]
    SyntaxError(String),
    #[error("unknown vertex name: {0}")]
    UnknownVertexName(String),
    #[error("unknown label name: {0}")]
    UnknownLabelName(String),
    #[error("focus variable ?{0} does not occur in any pattern")]
    FocusUnused(String),

    #[error("vertex set disagrees with the constraint at vertex {0}")]
    InconsistentVsg(String),

    #[error("oracle state budget exceeded ({0} states)")]
    BudgetExceeded(u64),

    #[error("requested {k} landmarks but the graph has only {vertices} vertices")]
    KTooLarge { k: usize, vertices: usize },
    #[error("index file format error: {0}")]
    FormatError(String),
    #[error("index fingerprint {found:016x} does not match graph fingerprint {expected:016x}")]
    FingerprintMismatch { expected: u64, found: u64 },
    #[error("index was not built over this graph")]
    IndexGraphMismatch,

    #[error("query set line {0}: {1}")]
    MalformedQuery(usize, String),
    #[error("invalid generator spec: {0}")]
    SpecInvalid(String),
    #[error("query generation gave up after {0} candidates")]
    Timeout(usize),
    #[error("no constraint with about {0} matches found")]
    Unachievable(u64),
}
