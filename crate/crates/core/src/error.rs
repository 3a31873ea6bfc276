use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("descriptor mismatch: {0} vs {1}")]
    DescriptorMismatch(String, String),
    #[error("invalid algebra descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("singular element: |det| = {det:.3e} below tolerance {tol:.3e}")]
    SingularElement { det: f64, tol: f64 },
    #[error("point left the tube domain at letter {letter}")]
    LeftTube { letter: usize },
    #[error("continuation path left the domain at parameter {t:.6}")]
    PathLeftDomain { t: f64 },
    #[error("not in the ball: {0}")]
    NotInBall(String),
    #[error("strip violation: Im z = {0} outside [0, pi]")]
    StripViolation(f64),
    #[error("re-factorization failed at index {0}")]
    FactorizationFailed(usize),
    #[error("duplicate points in Gram set")]
    DuplicatePoints,
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("grid underflow: kernel factor vanishes on the whole grid")]
    GridUnderflow,
    #[error("not a standard subspace: {0}")]
    NotStandard(String),
    #[error("empty region")]
    EmptyRegion,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("analytic continuation unavailable for this model")]
    ContinuationUnavailable,
    #[error("grid coverage: {0}")]
    GridCoverage(String),
    #[error("support overflow: {0}")]
    SupportOverflow(String),
    #[error("raw distribution vector has no norm; smear it first")]
    RawDistribution,
    #[error("frame mismatch")]
    FrameMismatch,
    #[error("left the upper half-plane at letter {0}")]
    LeftDomain(usize),
    #[error("frame insufficient: relative residual {0:.3e}")]
    FrameInsufficiency(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
