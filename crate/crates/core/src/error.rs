use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Retraction input too close to the degenerate set (|n| < 0.5 or the
    /// Gram-Schmidt remainder of m below 0.1).
    #[error("degenerate input for retraction: {0}")]
    DegenerateInput(String),
    #[error("director pair is off the constraint manifold by {0:e}")]
    ConstraintViolated(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("step rejected after {0} halvings")]
    StepRejectedRepeatedly(usize),
    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    CflViolated { dt: f64, bound: f64 },
    #[error("pressure Poisson solve did not converge: residual {0:e}")]
    PoissonNotConverged(f64),
    #[error("state window does not cover the parabolic cylinder: {0}")]
    WindowTooShort(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("unknown initial-data recipe `{0}`")]
    UnknownRecipe(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid value for `{field}`: {msg}")]
    Validation { field: String, msg: String },
    #[error("bad snapshot format: {0}")]
    Format(String),
    #[error("snapshot file is truncated")]
    TruncatedFile,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the configuration rather than by the run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Validation { .. } | Error::UnknownRecipe(_) | Error::InvalidGrid(_)
        )
    }
}
