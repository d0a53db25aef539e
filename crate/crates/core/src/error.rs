//! Error types shared across the library.
//!
//! Recoverable conditions (bad input degrees, insufficient series precision,
//! failed reconstruction) are reported through these enums. Violations of
//! internal invariants that can only arise from a bug (mismatched fields or
//! variables inside one computation) panic instead.

use thiserror::Error;

/// Errors from field, polynomial, and series arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("field order {p}^{e} exceeds the supported bound 2^16")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("extension degree must be at least 1")]
    ZeroExtensionDegree,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("digit index {digit} is out of range for a field of order {q}")]
    DigitOutOfRange { digit: u64, q: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division: nonzero remainder")]
    InexactDivision,
    #[error("Frobenius twists must have nonnegative exponent, got {0}")]
    NegativeTwist(i64),
    #[error("series precision exhausted: need coefficients up to exponent {need}, have {have}")]
    InsufficientPrecision { need: i64, have: i64 },
    #[error("no rational function with numerator degree {deg_num} and denominator degree {deg_den} matches the series")]
    ReconstructionFailed { deg_num: usize, deg_den: usize },
}

/// Errors from the special-polynomial and module-action layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CarlitzError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("index must be at least 1, got {0}")]
    IndexOutOfRange(u64),
    #[error("argument {m} is not divisible by q - 1 = {divisor}")]
    NotAEven { m: u64, divisor: u64 },
    #[error("denominator clearing left a rational coefficient at degree {degree}")]
    ClearingFailed { degree: usize },
    #[error("ratio calibration has not run for this context")]
    Uncalibrated,
    #[error("ratio calibration disagrees: constant {first}, then {second}")]
    CalibrationMismatch { first: u64, second: u64 },
    #[error("seeded table entry {index} disagrees with the memoized value")]
    SeedMismatch { index: usize },
}

/// Errors from normal-form computation and special-point construction.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Carlitz(#[from] CarlitzError),
    #[error("index pair ({s1}, {s2}) is invalid: both entries must be at least 1")]
    BadIndexPair { s1: u64, s2: u64 },
    #[error("second index {s2} must be divisible by q - 1 = {divisor}")]
    SecondIndexNotEven { s2: u64, divisor: u64 },
    #[error("residual second block is nonzero after reduction; the point does not descend")]
    NonzeroSecondBlock,
}

/// Errors from relation-finding.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Carlitz(#[from] CarlitzError),
    #[error("points live in different tensor powers: {0} vs {1}")]
    MixedWeights(usize, usize),
    #[error("certificate {index} failed exact re-verification under the module action")]
    CertificateCheckFailed { index: usize },
}

/// Errors from numeric evaluation and verification.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Carlitz(#[from] CarlitzError),
    #[error("depth bound {got} exceeds the configured maximum {max}")]
    DepthTooLarge { got: u64, max: u64 },
    #[error("a full-support degree enumeration of size {0} is too large")]
    EnumerationTooLarge(u128),
}

/// Top-level pipeline errors, tagged for exit-code mapping.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Carlitz(#[from] CarlitzError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error("numeric verification failed for weight {weight}: {detail}")]
    VerificationFailed { weight: u64, detail: String },
    #[error("numeric verification inconclusive for weight {weight}: {detail}")]
    VerificationInconclusive { weight: u64, detail: String },
    #[error("cache record at {path} does not match the requested parameters: {detail}")]
    CacheMismatch { path: String, detail: String },
    #[error("cache i/o at {path}: {source}")]
    CacheIo {
        path: String,
        source: std::io::Error,
    },
    #[error("cache record at {path} failed to parse: {detail}")]
    CacheFormat { path: String, detail: String },
    #[error("internal mathematical assertion failed at weight {weight}: {detail}")]
    MathAssertion { weight: u64, detail: String },
    #[error("invalid request: {0}")]
    BadRequest(String),
}

impl PipelineError {
    /// Classify for process exit codes: math assertion failures are distinct
    /// from verification failures and from inconclusive verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::VerificationFailed { .. } => 3,
            PipelineError::VerificationInconclusive { .. } => 4,
            PipelineError::BadRequest(_)
            | PipelineError::CacheIo { .. }
            | PipelineError::CacheFormat { .. }
            | PipelineError::CacheMismatch { .. } => 1,
            _ => 2,
        }
    }
}
