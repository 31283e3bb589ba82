use thiserror::Error;

/// Errors raised by the transform, reference and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate Chebyshev grid: degree must be at least 1")]
    DegenerateGrid,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("point {0} lies outside the reference interval [-1, 1]")]
    OutOfRange(f64),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("evaluator on domain {domain} returned a non-finite value at {at}")]
    Evaluator { domain: usize, at: f64 },
    #[error("point {x} is inside the enlarged domain {domain}; the regular rule does not apply")]
    TooClose { domain: usize, x: f64 },
    #[error("point {x} is outside the enlarged domain {domain}; use the regular rule")]
    TooFar { domain: usize, x: f64 },
    #[error("infinite domain {0} requires f(1/s)/s to stay bounded at s = 0")]
    NoDecay(usize),
    #[error("logarithmic divergence at x = {0}")]
    LogDivergence(f64),
    #[error("operation requires a continuous function: {0}")]
    Discontinuous(String),
    #[error("Fourier size must be even and positive, got {0}")]
    OddFourierSize(usize),
    #[error("unknown example id `{0}`")]
    UnknownExample(String),
    #[error("pole at z = {0}")]
    Pole(String),
    #[error("reference quadrature did not converge: estimated error {estimate:e} after {evaluations} evaluations")]
    OracleNoConvergence { estimate: f64, evaluations: usize },
    #[error("contour passes within {distance:e} of the evaluation point")]
    ContourTooClose { distance: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("Newton iteration diverged at step {step} (residual {residual:e})")]
    Diverged { step: usize, residual: f64 },
    #[error("Newton iteration did not converge in {iterations} steps (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("singular linear system (condition estimate {condition:e})")]
    Singular { condition: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
