use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The structure matrix J is not normal, does not square to -I, or has
    /// unbalanced +i/-i eigenspaces.
    #[error("invalid structure matrix: {0}")]
    Structure(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    /// A named solvability condition of the parameterized solution failed.
    #[error("condition {equation} violated (residual {residual:.3e})")]
    ConditionViolated { equation: &'static str, residual: f64 },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
