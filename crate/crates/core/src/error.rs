use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller passed arguments that do not fit together (mismatched spaces,
    /// non-binary masks, wrong vector lengths).
    #[error("usage error: {0}")]
    Usage(String),

    /// A configuration value is out of its documented range. `field` is the
    /// dotted path of the offending field.
    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    /// A configured cap (vector size, matrix size, group size, product count)
    /// would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A computation produced a non-finite or otherwise unusable number.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Operator configuration violates a structural requirement, e.g. mixing
    /// does not commute with the translation group.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// An iterative search (fixed point, exit point) did not succeed within
    /// its budget.
    #[error("search failure: {0}")]
    SearchFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for validation/usage problems, 3 for numeric and
    /// resource failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Validation { .. } | Error::Json(_) | Error::Configuration(_) => 2,
            Error::Resource(_) | Error::Numeric(_) | Error::SearchFailure(_) | Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
