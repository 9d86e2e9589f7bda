use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A copula parameter lies outside the admissible set of its family.
    #[error("invalid parameters for {family}: {detail}")]
    InvalidParams { family: String, detail: String },

    /// An evaluation point lies outside the required (open) domain.
    #[error("argument outside the required domain: {0}")]
    Domain(String),

    /// Input has the wrong size or shape.
    #[error("bad input size: {0}")]
    Size(String),

    /// A numeric routine failed to converge or produced a non-finite value.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Invalid run configuration (CLI flags, config files, file formats).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: config/input problems map to 2,
    /// numeric failures to 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}
