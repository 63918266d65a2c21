use thiserror::Error;

/// Errors raised by the simulator and its building blocks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("singular or ill-conditioned channel (condition number {condition:.3e})")]
    SingularChannel { condition: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("buffer overflow: occupancy {occupancy} + {incoming} exceeds capacity {capacity}")]
    BufferOverflow {
        capacity: usize,
        occupancy: usize,
        incoming: usize,
    },

    #[error("buffer underflow: occupancy {occupancy}, block needs {needed}")]
    BufferUnderflow { occupancy: usize, needed: usize },

    #[error("no feasible link in either phase")]
    Deadlock,

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("unknown policy `{0}` (expected direct, max-ratio, max-link, ml-rs or ml-srs)")]
    UnknownPolicy(String),

    #[error("scenario parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension",
            Error::SingularChannel { .. } => "singular",
            Error::InvalidParameter(_) => "parameter",
            Error::BufferOverflow { .. } => "buffer_overflow",
            Error::BufferUnderflow { .. } => "buffer_underflow",
            Error::Deadlock => "deadlock",
            Error::Validation(_) => "validation",
            Error::UnknownPolicy(_) => "policy",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}
