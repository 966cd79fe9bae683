use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {value} lies outside the open interval ({lo}, {hi})")]
    Domain { value: f64, lo: f64, hi: f64 },
    #[error("finite differencing at {at} would step outside the domain")]
    DerivativeUnavailable { at: f64 },
    #[error("metric density is not integrable: {0}")]
    NonIntegrable(String),
    #[error("value {value} is outside the range ({lo}, {hi}) of the transform")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point ({re}, {im}) is not inside the unit disk")]
    OutsideDisk { re: f64, im: f64 },
    #[error("finite-difference stencil at ({re}, {im}) with step {h} leaves the disk")]
    StencilOutsideDisk { re: f64, im: f64, h: f64 },
    #[error("relaxation did not converge: last update {last_update:e} after {sweeps} sweeps")]
    NoConvergence { sweeps: usize, last_update: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("numeric inversion failed at ({re}, {im})")]
    NumericInversionFailure { re: f64, im: f64 },
    #[error("malformed specification: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonIntegrable(_) | Error::NoConvergence { .. } | Error::NumericInversionFailure { .. }
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
