use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("quadrature did not converge: error {error:.3e} after {evaluations} evaluations")]
    NonConvergence { error: f64, evaluations: usize },

    /// No root of the time-map equation in the admissible range. The signs of
    /// `J - target` at the two ends of the searched range are kept for
    /// diagnostics.
    #[error("no solution: {reason} (sign at lower end {lower_sign:+}, upper end {upper_sign:+})")]
    NoSolution {
        reason: String,
        lower_sign: i8,
        upper_sign: i8,
    },

    #[error("found {count} sign changes where exactly one was expected")]
    MultipleRoots { count: usize },

    #[error("gradient blow-up: |u'| = {slope:.3e} exceeds cap at x = {x}")]
    GradientBlowup { x: f64, slope: f64 },

    #[error("gradient constraint violated: |u'| = {slope} at x = {x}")]
    ConstraintViolation { x: f64, slope: f64 },

    #[error("step size underflow at x = {x} (h = {step:.3e})")]
    StepUnderflow { x: f64, step: f64 },

    #[error("degenerate zero at x = {x}: u and u' vanish together")]
    DegenerateZero { x: f64 },

    #[error("amplitude {xi} is not a solution: |J - 1/2| = {residual:.3e}")]
    NotASolution { xi: f64, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
