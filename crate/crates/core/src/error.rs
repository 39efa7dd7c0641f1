use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto process exit codes: input problems exit with 2,
/// budget and evaluation failures with 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error(
        "quadrature budget exhausted after {subdivisions} subdivisions: \
         value {value:e}, error estimate {err_estimate:e}, target {target:e}"
    )]
    QuadratureBudget {
        value: f64,
        err_estimate: f64,
        target: f64,
        subdivisions: usize,
    },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("fit quality check failed: {0}")]
    FitQuality(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by running out of numerical budget rather than bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidInput(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
