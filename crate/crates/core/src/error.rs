use thiserror::Error;

/// Errors raised by parameter validation and the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("{function}: argument {value} outside domain ({domain})")]
    Domain {
        function: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("quadrature did not converge after {subdivisions} subdivisions (value {value:e}, error estimate {error:e})")]
    NoConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
