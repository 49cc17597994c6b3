use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("dimension mismatch: {0}")]
    DimensionError(String),

    #[error("unsupported transform kind `{0}`")]
    UnsupportedTransform(String),

    #[error("bad transform parameters for `{kind}`: {reason}")]
    TransformParameters { kind: String, reason: String },

    #[error("singular covariance matrix (condition number {condition:.3e})")]
    SingularCovariance { condition: f64 },

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("state is not pure (purity {purity:.6})")]
    PurityError { purity: f64 },

    #[error("unphysical input: {0}")]
    UnphysicalInput(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("state is not NPPT: {0}")]
    NotNppt(String),

    #[error("singular denominator: (lambda + sigma^2)^2 - c_x^2 = {0:.3e}")]
    SingularDenominator(f64),

    #[error("state is not secure against finite coherent attacks: lambda - (lambda+c_x)(lambda-c_x)(lambda-c_p) = {0:.6} <= 0")]
    NotCoherentSecure(f64),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("sweep produced no admissible states ({skipped} skipped)")]
    EmptySweep { skipped: usize },

    #[error("no advantage: error rate {0} is not below 1/2")]
    NoAdvantage(f64),

    #[error("key length {key} does not match message length {message}")]
    KeyLengthError { message: usize, key: usize },

    #[error("public exponent {exponent} is not coprime with phi = {phi}")]
    InvalidExponent { exponent: u64, phi: u64 },

    #[error("message {message} is not smaller than modulus {modulus}")]
    MessageTooLarge { message: u64, modulus: u64 },

    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
