use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant maps onto a process exit code through [`Error::exit_code`],
/// so front ends can report failures without matching on messages.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Result would overflow or is not representable.
    #[error("range error: {0}")]
    Range(String),
    /// An iterative method failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Ray geometry violates a hypothesis of the recovery.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Invalid configuration or inconsistent input data.
    #[error("configuration error: {0}")]
    Config(String),
    /// Error amplification made a recovery order unreliable.
    #[error("precision error at order {order}: {detail}")]
    Precision { order: usize, detail: String },
    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Exit code for command-line front ends: 2 for bad input or geometry,
    /// 3 for precision failures, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Geometry(_) | Error::Config(_) | Error::Parse(_) => 2,
            Error::Precision { .. } => 3,
            Error::Domain(_) | Error::Range(_) | Error::Numeric(_) | Error::Io(_) => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
