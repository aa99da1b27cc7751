use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("alpha = {0} is outside the admissible range [0, 3/2)")]
    AlphaOutOfRange(f64),

    #[error("failed to locate zero #{index} of {kind} for order {nu}")]
    ZeroNotFound { nu: f64, index: usize, kind: &'static str },

    #[error("index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("step {dt:e} exceeds the admissible maximum {max:e}")]
    StepSize { dt: f64, max: f64 },

    #[error("coupling <B phi_1, phi_{k}> = {value:e} vanishes")]
    VanishingCoupling { k: usize, value: f64 },

    #[error("eigenvalue separation lambda_2 - lambda_1 = {0} is below 0.5")]
    DegenerateSpectrum(f64),

    #[error("window {window}: {reason}")]
    Window { window: usize, reason: String },

    #[error("decay fit rejected: {0}")]
    FitRejected(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
