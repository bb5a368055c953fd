use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {nodes} nodes but {samples} samples")]
    LengthMismatch { nodes: usize, samples: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("divergent moment: {0}")]
    DivergentMoment(String),

    #[error("divergent norm: {0}")]
    DivergentNorm(String),

    #[error("dyadic window insufficient: {0}")]
    WindowInsufficient(String),

    #[error("non-finite intermediate value: {0}")]
    NonFinite(String),

    #[error("theorem {theorem}: hypothesis violated: {reason}")]
    Hypothesis { theorem: String, reason: String },

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Divergence of a moment, a norm or a supremum, as opposed to bad input.
    pub fn is_divergence(&self) -> bool {
        matches!(
            self,
            Error::DivergentMoment(_)
                | Error::DivergentNorm(_)
                | Error::WindowInsufficient(_)
                | Error::NonFinite(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
