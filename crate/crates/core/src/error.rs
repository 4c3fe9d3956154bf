use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { point: Vec<f64>, min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("characteristic inversion did not converge in {iterations} iterations at t = {t} (caustic proximity)")]
    InversionFailed { t: f64, iterations: usize },

    #[error("step rejected: Hamiltonian drift {drift:e} exceeds {tolerance:e}")]
    StepRejected { drift: f64, tolerance: f64 },

    #[error("resolution budget exceeded: {required} quadrature nodes required, budget is {budget}")]
    ResolutionBudget { required: u64, budget: u64 },

    #[error("underdetermined fit: {0}")]
    Underdetermined(String),

    #[error("inadmissible pair: {0}")]
    Inadmissible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
