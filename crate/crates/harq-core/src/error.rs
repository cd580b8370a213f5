use thiserror::Error;

/// Errors raised by the analytic, oracle and simulation paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The relayed-link mean equals the direct-link mean, so the
    /// hypoexponential density constant `C = 1/(mean_up - mean_sd)` is undefined.
    #[error("degenerate link means: mean_up = {mean_up}, mean_sd = {mean_sd}")]
    DegenerateMeans { mean_up: f64, mean_sd: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("contour integral left an imaginary residue {imag:e} against real part {real:e}")]
    ResidualImaginary { real: f64, imag: f64 },

    #[error("numerical inconsistency in {context}: raw value {raw}")]
    NumericalInconsistency { context: String, raw: f64 },

    #[error("unsupported parameter structure: {0}")]
    Unsupported(String),

    #[error("recursion depth {0} exceeds the quadrature oracle limit of 4")]
    DepthExceeded(usize),

    #[error("queue is unstable (rho = {rho})")]
    Unstable { rho: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
