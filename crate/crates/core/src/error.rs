use thiserror::Error;

/// Errors produced by the problem oracles, solvers and diagnostics.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing constant `{0}`")]
    MissingConstant(&'static str),

    #[error("oracle required: {0}")]
    OracleRequired(&'static str),

    #[error("no closed-form proximal map for this function")]
    NoClosedFormProx,

    #[error("linear system is singular")]
    SingularSystem,

    #[error("inner iteration did not reach tol after {iterations} iterations (last residual {residual:e})")]
    FixedPointDivergence { iterations: usize, residual: f64 },

    #[error("iterate at step {step} left the certified ball (norm {norm:.6e} > radius {radius:.6e})")]
    BallExit { step: usize, norm: f64, radius: f64 },

    #[error("no iterate satisfies the tolerance test; increase epsilon or T ({hint})")]
    EmptyFeasibleSet { hint: String },

    #[error("insufficient data: {positive} positive points in window, need at least {required}")]
    InsufficientData { positive: usize, required: usize },

    #[error("switching weight is not differentiable at this point")]
    NonDifferentiablePoint,

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("multiplier bracket not found below {0:e}: problem infeasible or ill-conditioned")]
    InfeasibleOrIllConditioned(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
