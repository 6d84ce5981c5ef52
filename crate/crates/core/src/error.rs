use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("singular curve: 4b^3 + 27c^2 = 0 for b = {b}, c = {c}")]
    SingularCurve { b: BigInt, c: BigInt },

    #[error("point is not on the curve")]
    PointNotOnCurve,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("primes must be pairwise distinct (got {0}, {1}, {2})")]
    PrimesNotDistinct(u64, u64, u64),

    #[error("2 is not an admissible family prime; p, q, r must be odd")]
    PrimeIsTwo,

    #[error("m must be a positive integer")]
    NonPositiveM,

    #[error("curve has bad reduction at {0}")]
    BadReduction(u64),

    #[error("Hasse bound violated: #E(F_{modulus}) = {count}")]
    HasseViolation { modulus: u64, count: u64 },

    #[error("unsupported torsion order {0}; expected one of 2, 3, 5, 7")]
    UnsupportedOrder(u32),

    #[error("cannot halve the point at infinity; use the 2-torsion list")]
    InfinityTarget,

    #[error("modulus {0} exceeds the point-counting cap {1}")]
    ModulusTooLarge(u64, u64),

    #[error("invalid sweep specification: {0}")]
    InvalidSweep(String),

    #[error("record parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
