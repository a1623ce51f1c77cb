use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violates a domain invariant. `field` names the offending input.
    #[error("invalid {field}: {value} ({reason})")]
    InvalidParameter {
        field: String,
        value: String,
        reason: String,
    },

    /// A calibration target lies outside the range the model can reach.
    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}:{line}: {message}")]
    Row {
        path: String,
        line: u64,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(
        field: impl Into<String>,
        value: impl std::fmt::Display,
        reason: impl Into<String>,
    ) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            value: value.to_string(),
            reason: reason.into(),
        }
    }

    /// Process exit code for the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoSolution(_) => 2,
            _ => 1,
        }
    }

    /// Prefix the field path, e.g. `rho` becomes `risk.rho`.
    pub fn within(self, parent: &str) -> Self {
        match self {
            Error::InvalidParameter {
                field,
                value,
                reason,
            } => Error::InvalidParameter {
                field: format!("{parent}.{field}"),
                value,
                reason,
            },
            other => other,
        }
    }
}
