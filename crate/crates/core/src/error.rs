use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial is reducible over F_{p}: {poly:?}")]
    Reducible { p: u64, poly: Vec<u64> },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("element {0} out of range for the field")]
    ElementOutOfRange(u64),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("encoding overflow: 2^{bits} values do not fit in {n} base-{p} digits")]
    EncodingOverflow { bits: usize, p: u64, n: usize },
    #[error("distribution is not normalized (sum = {0})")]
    NotNormalized(f64),
    #[error("negative probability mass at outcome {0}")]
    NegativeMass(u64),
    #[error("supports do not match")]
    SupportMismatch,
    #[error("min-entropy floor violated: realized {realized} < declared {declared}")]
    EntropyFloor { realized: f64, declared: f64 },
    #[error("rejection-sampling precondition violated at outcome {outcome}: X({outcome}) > 2^k Y({outcome})")]
    DmaxExceeded { outcome: u64 },
    #[error("tampering table has a fixed point at {0}")]
    FixedPoint(u64),
    #[error("domain too large for exhaustive enumeration ({size} > {limit}); use sampled mode")]
    DomainTooLarge { size: u128, limit: u128 },
    #[error("regime violation: {0}")]
    Regime(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semi-definite (eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("unknown register {0}")]
    UnknownRegister(String),
    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,
    #[error("Kraus operators do not satisfy completeness (deviation {0:.3e})")]
    NotComplete(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("malformed frame: {0}")]
    MalformedFrame(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
