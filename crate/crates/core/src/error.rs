use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge (error estimate {estimate:e})")]
    Convergence { what: String, estimate: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {flo:e}, f(hi) = {fhi:e}")]
    Bracketing { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A construction precondition failed; `inequality` names it.
    #[error("construction error: {inequality} violated ({detail})")]
    Construction { inequality: String, detail: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("solver failure: {message}")]
    Solver { message: String, residual_history: Vec<f64> },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn construction(inequality: &str, detail: impl Into<String>) -> Self {
        Error::Construction {
            inequality: inequality.to_string(),
            detail: detail.into(),
        }
    }
}
