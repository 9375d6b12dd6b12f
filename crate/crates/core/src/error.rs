//! Crate-wide error type.
//!
//! Two failure classes are kept apart because callers treat them
//! differently: [`Error::Format`] means an input file could not be decoded
//! (the CLI maps it to exit code 2 and points at the offending line), while
//! [`Error::Contract`] means well-formed inputs violated an operation's
//! precondition (exit code 3).

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Error raised by any operation in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input file (or in-memory text) failed to parse. `path` is the
    /// label given to the parser, `line` is 1-based.
    #[error("{path}:{line}: {message}")]
    Format {
        /// Source label, usually a file path.
        path: String,
        /// 1-based line number of the offending line.
        line: usize,
        /// What was wrong with it.
        message: String,
    },

    /// A precondition of an operation was violated by otherwise well-formed
    /// input.
    #[error("{0}")]
    Contract(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Build a [`Error::Format`] without spelling out the struct literal.
    pub fn format(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Build a [`Error::Contract`].
    pub fn contract(message: impl Into<String>) -> Self {
        Error::Contract(message.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_error_displays_path_and_line() {
        let err = Error::format("scores.txt", 17, "expected 3 fields, found 2");
        assert_eq!(err.to_string(), "scores.txt:17: expected 3 fields, found 2");
    }

    #[test]
    fn contract_error_displays_message() {
        let err = Error::contract("k (12) exceeds real speaker count (5)");
        assert_eq!(err.to_string(), "k (12) exceeds real speaker count (5)");
    }
}
