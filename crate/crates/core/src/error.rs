use thiserror::Error;

/// Errors raised by the numerical kernels and the physics layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("momentum {value} outside the open domain (-{bound}, {bound})")]
    Domain { value: f64, bound: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported for this deformation family: {0}")]
    Unsupported(String),

    #[error(
        "quadrature did not converge after {levels} levels (estimate {estimate}, error {error})"
    )]
    QuadratureNotConverged {
        levels: usize,
        estimate: f64,
        error: f64,
    },

    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteIntegrand { x: f64 },

    #[error("no sign change found expanding from seed {seed} within {iterations} steps")]
    BracketNotFound { seed: f64, iterations: usize },

    #[error("function returned a non-finite value at x = {x}")]
    NonFiniteFunction { x: f64 },

    #[error("root refinement exceeded {0} iterations")]
    MaxIterations(usize),

    #[error("boundary condition violated: mismatch {mismatch}")]
    BoundaryCondition { mismatch: f64 },

    #[error("least-squares fit is ill-conditioned: {0}")]
    FitConditioning(String),
}

pub type Result<T> = std::result::Result<T, Error>;
