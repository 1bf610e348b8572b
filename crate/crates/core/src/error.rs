use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tuple {0:?} is not strictly increasing")]
    NonIncreasingTuple(Vec<usize>),
    #[error("index {index} out of range [1, {bound}]")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("rank {rank} out of range for C({n},{k}) = {count}")]
    RankOutOfRange { rank: u64, n: usize, k: usize, count: u64 },
    #[error("binomial coefficient overflow (n = {0}, maximum supported is 62)")]
    BinomialOverflow(usize),
    #[error("mismatched shapes: {0}")]
    MismatchedShapes(String),
    #[error("order k = {k} not in [1, {max}]")]
    OrderTooLarge { k: usize, max: usize },
    #[error("compound of size {rows}x{cols} exceeds cap of {cap} entries")]
    CompoundSizeCapExceeded { rows: u64, cols: u64, cap: u64 },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),
    #[error("transform is singular or ill-conditioned (rcond = {0:e})")]
    SingularTransform(f64),
    #[error("scaling matrix is singular or ill-conditioned (rcond = {0:e})")]
    SingularScaling(f64),
    #[error("matrix is singular")]
    Singular,
    #[error("function evaluation failed: {0}")]
    EvaluationFailure(String),
    #[error("symmetric eigensolver did not converge after {0} sweeps")]
    NonConvergence(usize),
    #[error("eigensolve failed: {0}")]
    EigensolveFailure(String),
    #[error("QR iteration did not converge after {0} iterations")]
    QrNonConvergence(usize),
    #[error("matrix of order {n} exceeds eigenvalue cap {cap}")]
    EigenSizeCap { n: usize, cap: usize },
    #[error("state left the domain at t = {t}: {state:?}")]
    StateLeftDomain { t: f64, state: Vec<f64> },
    #[error("non-finite state at t = {0}")]
    NonFiniteState(f64),
    #[error("invalid step or time span: {0}")]
    InvalidStep(String),
    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),
    #[error("no period declared for the system")]
    NoPeriodFound,
    #[error("jacobian does not match finite differences (relative error {error:e} at {point:?})")]
    JacobianMismatch { error: f64, point: Vec<f64> },
    #[error("sample {0} is not diagonal")]
    NotDiagonal(usize),
    #[error("bad weight vector: {0}")]
    BadWeightVector(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("unknown model '{0}'")]
    UnknownModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trajectory component x{component} = {value:e} too close to zero at t = {t}")]
    GammaNearZero { component: usize, value: f64, t: f64 },
    #[error("grid of {0} samples exceeds the cap")]
    GridTooLarge(u64),
    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
