use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("point lies outside the chart domain")]
    PointOutsideDomain,
    #[error("metric is numerically singular at the evaluation point")]
    SingularMetric,
    #[error("seed vectors do not span a complement of the field direction")]
    DegenerateSeed,
    #[error("the two directions span a degenerate plane")]
    DegeneratePlane,
    #[error("field is not unit at the evaluation point (|xi|_g = {norm})")]
    NonUnitField { norm: f64 },
    #[error("direction is not orthogonal to the field")]
    NotOrthogonalToXi,
    #[error("operation requires a built-in round sphere")]
    NotASphere,
    #[error("initial angle is too close to an ODE singularity")]
    ImmediateSingularity,
    #[error("parameter a must be nonzero for this trajectory branch")]
    ZeroParameter,
    #[error("sin(a x) vanishes at the requested abscissa")]
    SingularAbscissa,
    #[error("unknown registry key `{0}`")]
    UnknownRegistryKey(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GeomError>;
