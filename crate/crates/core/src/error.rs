use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },

    #[error("unbound name `{name}` (chart coordinates: {})", .coords.join(", "))]
    Unbound { name: String, coords: Vec<String> },

    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },

    #[error("jet order exceeded: requested {requested}, available {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("point {point:?} violates domain constraint `{constraint}`")]
    Constraint { point: Vec<f64>, constraint: String },

    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("singular matrix at {point:?}")]
    Singular { point: Vec<f64> },

    #[error("invalid chart: {0}")]
    Chart(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("scenario error at {path}: {message}")]
    Scenario { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn scenario(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Attaches the offending subexpression to a domain error that lacks one.
    pub(crate) fn in_expr(self, expr: impl FnOnce() -> String) -> Self {
        match self {
            Error::Domain { expr: e, reason } if e.is_empty() => Error::Domain {
                expr: expr(),
                reason,
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
