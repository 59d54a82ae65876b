use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} exceeds the supported maximum of 16")]
    TooLarge(usize),
    #[error("matrix is singular to working precision (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("{0} failed to converge")]
    NoConvergence(&'static str),
    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },
    #[error("argument within {distance:e} of a pole")]
    PoleProximity { distance: f64 },
    #[error("evaluation hits a pole of the Blaschke product")]
    Pole,
    #[error("boundary is not an ellipse (max radial residual {residual:e})")]
    NotAnEllipse { residual: f64 },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("matrix is a scalar multiple of the identity")]
    TrivialMatrix,
    #[error("not supported: {0}")]
    NotSupported(&'static str),
    #[error("decomposition residual {residual:e} exceeds tolerance")]
    InvalidDecomposition { residual: f64 },
}
