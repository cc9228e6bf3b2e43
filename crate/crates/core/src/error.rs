use alloc::string::String;

/// Failures raised by the exact computations in this crate.
///
/// Variants that report a failed identity carry enough context to
/// reproduce the failing step by hand.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("mismatched torus half-dimension: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("mismatched group parameters: (n={n1}, p={p1}) vs (n={n2}, p={p2})")]
    GroupMismatch { n1: usize, p1: u64, n2: usize, p2: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("odd primes only (got p={0})")]
    EvenPrime(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p={p} is not congruent to 1 mod {modulus}")]
    NotCongruent { p: u64, modulus: u64 },

    #[error("p={p} must exceed M={m}")]
    PrimeTooSmall { p: u64, m: u64 },

    #[error("series constant term must be 1 (got {0})")]
    NotUnitSeries(String),

    #[error("symmetrization residual is nonzero for n={n}, k={k}: {detail}")]
    NonzeroResidual { n: usize, k: usize, detail: String },

    #[error("non-integral Chern coefficient at degree {degree}: {value}")]
    NonIntegralChern { degree: usize, value: String },

    #[error("check failed at {step}: {detail}")]
    CheckFailed { step: &'static str, detail: String },

    #[error("budget exceeded: {what} needs {needed}, budget {budget}")]
    BudgetExceeded { what: &'static str, needed: String, budget: u64 },

    #[error("search exhausted after {attempts} attempts: {what}")]
    SearchExhausted { what: &'static str, attempts: u64 },

    #[error("n={n} exceeds the supported cap {cap}")]
    TooLarge { n: usize, cap: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
