use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: argument {value} is outside the domain ({reason})")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("integrand returned a non-finite value at x = {abscissa}")]
    NonFiniteSample { abscissa: f64 },

    #[error("invalid quadrature specification: {0}")]
    InvalidSpec(&'static str),

    #[error("quadrature did not converge: estimate {value}, error {error_estimate}")]
    Quadrature { value: f64, error_estimate: f64 },

    #[error("{what} did not converge after {iterations} iterations (last change {last_change:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
        history: Vec<f64>,
    },

    #[error("validity guard violated: {0}")]
    Validity(String),

    #[error("step count {steps} too small: estimated error {residual:e} exceeds {tolerance:e}")]
    StepCount {
        steps: usize,
        residual: f64,
        tolerance: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
