use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A function was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid user-facing input (flags, configuration, file contents).
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// Malformed row in a counts CSV file.
    #[error("csv parse error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    /// A numerical computation degenerated (overflow, non-finite path, ...).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Matrix inversion refused because the condition number exceeds the limit.
    #[error("singular matrix: condition number {cond:.3e} exceeds {limit:.1e}")]
    Singular { cond: f64, limit: f64 },

    /// A truncated series hit its term cap before meeting the tail bound.
    #[error("series truncation cap reached: {0}")]
    TruncationCap(String),

    /// Data unusable for estimation (constant counts, all zeros, too short).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for usage/validation problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) | Error::Csv { .. } | Error::Domain(_) | Error::Io(_) => 2,
            Error::Numeric(_)
            | Error::Singular { .. }
            | Error::TruncationCap(_)
            | Error::Degenerate(_) => 3,
        }
    }
}
