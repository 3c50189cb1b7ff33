use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is singular (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("conjugate gradient breakdown at iteration {iteration}: pAp = {value:e}")]
    Breakdown { iteration: usize, value: f64 },

    #[error("singular change of basis on coarse edge {edge}")]
    SingularCoarseEdge { edge: usize },

    #[error("singular constrained Neumann problem on subdomain {subdomain}: {source}")]
    SingularSaddle {
        subdomain: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("zero weight denominator on glob {glob}")]
    ZeroWeight { glob: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
