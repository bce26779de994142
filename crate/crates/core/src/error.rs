use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("({x}, {y}) lies outside the finiteness domain of {what}")]
    DomainViolation { what: String, x: f64, y: f64 },

    #[error("erfi argument {0} exceeds the overflow guard |x| <= 25")]
    OverflowRange(f64),

    #[error("target {target} is outside the range of the weight map")]
    OutOfRange { target: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot realize the pmf with n = {n}: {reason}")]
    InvalidArrangement { n: usize, reason: String },
}

impl Error {
    pub(crate) fn domain(what: impl Into<String>, x: f64, y: f64) -> Self {
        Error::DomainViolation {
            what: what.into(),
            x,
            y,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
