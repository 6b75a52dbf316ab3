use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operation requires spatial dimension 1, grid has d = {0}")]
    UnsupportedDimension(usize),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("{name} = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("Gamma function pole at argument {0}")]
    GammaPole(f64),

    #[error("no closed-form constant for (s, p) = ({s}, {p}) in dimension {d}")]
    NoClosedForm { s: f64, p: f64, d: usize },

    #[error("exponent relation violated: {0}")]
    Exponents(String),

    #[error("non-finite sample at phase-space point ({x}, {xi})")]
    NonFinite { x: f64, xi: f64 },

    #[error("offset {0} is not a multiple of the position spacing")]
    OffLattice(f64),

    #[error("root finder failed to converge: {0}")]
    NoConvergence(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("operator has zero trace and cannot be normalized")]
    ZeroTrace,

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("empty operator tuple")]
    EmptyTuple,

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },
}

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}

pub(crate) fn config(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}
