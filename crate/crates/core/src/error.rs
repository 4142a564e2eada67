use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no phasematched solution: {0}")]
    NoPhasematch(String),

    /// Zero pump walk-off; the dual-pump formulas divide by it.
    #[error("degenerate pump configuration (tau_p = 0); use the degenerate-pump JSA instead")]
    DegenerateConfiguration,

    #[error("complex erf overflow: |Im z| = {0} exceeds the supported bound")]
    Overflow(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("grid is not normalized")]
    NotNormalized,

    /// Two grids were combined whose axes differ; resample first.
    #[error("axis mismatch: {0}; resample onto a common grid first")]
    AxisMismatch(String),

    #[error("estimator undefined: {0}")]
    UndefinedEstimator(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("no signal: {0}")]
    NoSignal(String),

    #[error("data not identifiable: {0}")]
    Identifiability(String),

    #[error("fit did not converge after {iterations} iterations (cost {cost:.6e}, gradient norm {gradient_norm:.3e})")]
    NonConvergence {
        iterations: usize,
        cost: f64,
        gradient_norm: f64,
        /// Last iterate in physical parameter order
        /// `[N_s, N_i, eta_s, eta_i, p_max, sigma, tau_p, tau_c]`.
        last: [f64; 8],
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
