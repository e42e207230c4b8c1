use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0} (supported: 1..=10)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("basis index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("repeated basis index {0} in monomial")]
    RepeatedIndex(usize),
    #[error("interior product of a 0-form is undefined")]
    InteriorOfScalar,
    #[error("metric is not symmetric")]
    NotSymmetric,
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
    #[error("metric is singular")]
    SingularMetric,
    #[error("orientation volume form is zero")]
    ZeroOrientation,
    #[error("not a positive G2 form: {0}")]
    NotPositiveG2(String),
    #[error("torsion extraction failed: {0}")]
    Torsion(String),
    #[error("matrix is not a derivation (residual {0:.3e})")]
    NotADerivation(f64),
    #[error("psi is not stable of complex type (lambda = {0:.6e})")]
    UnstablePsi(f64),
    #[error("invalid SU(3) structure: {0}")]
    InvalidSu3(String),
    #[error("structure is not calibrated (|d phi| = {0:.3e})")]
    NotCalibrated(f64),
    #[error("t = {t} outside the existence interval ({lower}, inf)")]
    OutsideInterval { t: f64, lower: f64 },
    #[error("flow initial condition rejected: {0}")]
    FlowInit(String),
    #[error("unknown catalog entry '{0}'")]
    UnknownCatalog(String),
    #[error("{0}")]
    Parse(#[from] crate::input::ParseError),
    #[error("invalid document: {0}")]
    Document(String),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
