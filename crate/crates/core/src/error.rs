use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a discriminant: must be negative and congruent to 0 or 1 mod 4")]
    NotADiscriminant(i64),
    #[error("discriminant {0} is not fundamental")]
    NotFundamental(i64),
    #[error("form ({a}, {b}, {c}) is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },
    #[error("form ({a}, {b}, {c}) is not primitive")]
    NotPrimitive { a: i64, b: i64, c: i64 },
    #[error("forms have different discriminants {0} and {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} does not split in discriminant {d}")]
    NotSplit { p: u64, d: i64 },
    #[error("prime {p} is not represented by a prime form of discriminant {d}")]
    NotRepresentable { p: u64, d: i64 },
    #[error("prime {0} equals the isogeny degree")]
    PrimeEqualsEll(u64),
    #[error("{ell} is {actual} in discriminant {d}, expected {expected}")]
    WrongRamification { d: i64, ell: u64, expected: &'static str, actual: String },
    #[error("conductor {c} is not coprime to {ell}")]
    ConductorNotCoprime { c: u64, ell: u64 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{what} exceeds cap: {size} > {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("no coprime representative found for conductor {0}")]
    NoCoprimeRepresentative(u64),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("hypothesis not satisfied: {0}")]
    HypothesisViolation(String),
    #[error("invalid volcano specification: {0}")]
    InvalidSpec(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
