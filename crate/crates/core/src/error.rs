use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parameter point outside the domain: {0}")]
    Domain(String),
    #[error("singular parametrization at {0}")]
    SingularPoint(String),
    #[error("energy {0} is outside the oscillatory window")]
    OutOfWindow(f64),
    #[error("ODE integration failed: {0}")]
    IntegrationFailure(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("root finder did not converge: {0}")]
    Convergence(String),
    #[error("surface generation failed: {0}")]
    GenerationFailed(String),
    #[error("degenerate element {index} (area {area:e})")]
    DegenerateElement { index: usize, area: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("shifted matrix stayed singular after {0} retries")]
    ShiftRetryExhausted(usize),
    #[error("first eigenfunction changes sign (min/max = {0:e}); λ₁ may not be simple")]
    GroundStateSign(f64),
}

impl Error {
    /// `true` for errors caused by bad input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension(_)
                | Error::InvalidParameter(_)
                | Error::Domain(_)
                | Error::OutOfWindow(_)
                | Error::NoSolution(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
