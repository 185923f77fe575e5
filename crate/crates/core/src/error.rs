use thiserror::Error;

/// Errors surfaced by the word simulator, the node and tree structures, and
/// the trace tooling.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands (or an operand and the context) disagree on the word width.
    #[error("word width mismatch: {left} vs {right}")]
    WidthMismatch { left: u32, right: u32 },

    #[error("shift amount {amount} exceeds word width {width}")]
    ShiftOutOfRange { amount: u64, width: u32 },

    #[error("field range out of bounds: {0}")]
    FieldOutOfRange(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A precondition of a structural operation was violated.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("node is full (capacity {capacity})")]
    Capacity { capacity: usize },

    #[error("no such rank {rank} (size {len})")]
    NoSuchRank { rank: u64, len: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("line {line}: {msg}")]
    Trace { line: usize, msg: String },

    /// An internal consistency check failed.
    #[error("audit failed: {0}")]
    Audit(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
