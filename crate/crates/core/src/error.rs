use thiserror::Error;

/// Errors raised by the library. Every variant is a usage error: the caller
/// passed arguments outside an operation's domain.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("the set is empty")]
    EmptySet,
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("residue {value} is out of range for modulus {modulus}")]
    OutOfRange { value: i64, modulus: u32 },
    #[error("duplicate residue {0} in set literal")]
    Duplicate(u32),
    #[error("cannot parse set literal {0:?}")]
    Parse(String),
    #[error("fold count h must be at least 1")]
    ZeroFold,
    #[error("scale {scale} is not invertible modulo {modulus}")]
    NotInvertible { scale: i64, modulus: u32 },
    #[error("{divisor} does not divide {modulus}")]
    NotDivisor { divisor: u32, modulus: u32 },
    #[error("exhaustive enumeration is limited to n <= {limit} (got n = {n}); use a cardinality cap instead")]
    EnumerationLimit { n: u32, limit: u32 },
    #[error("set is not normalized: {0}")]
    NotNormalized(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
