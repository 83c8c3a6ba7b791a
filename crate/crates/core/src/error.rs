use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no transitive-group count configured for degree {0}")]
    UnknownDegree(u32),
    #[error("T-number {t_number} out of range for degree {degree} (1..={count})")]
    TNumberOutOfRange {
        degree: u32,
        t_number: u32,
        count: u32,
    },
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("primes must be strictly increasing ({0} after {1})")]
    UnsortedPrimes(u64, u64),
    #[error("exponent of {0} must be positive")]
    ZeroExponent(u64),
    #[error("negative exponent for {0}")]
    NegativeExponent(u64),
    #[error("input must be positive")]
    NonPositive,
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("malformed discriminant {0:?}")]
    BadDiscriminant(String),
    #[error("malformed prime-power product {0:?}")]
    BadProduct(String),
    #[error("class group factor must be at least 1")]
    BadClassGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("absolute discriminant must be at least 1")]
    Zero,
    #[error("value has {digits} digits; four-digit exponent prefix holds at most 10000")]
    Capacity { digits: usize },
    #[error("malformed discriminant key {0:?}")]
    MalformedKey(String),
    #[error("T-number {t_number} outside 1..={count} for degree {degree}")]
    MemberOutOfRange {
        degree: u32,
        t_number: u32,
        count: u32,
    },
    #[error("no transitive-group count configured for degree {0}")]
    UnknownDegree(u32),
    #[error("malformed group-set code {0:?}")]
    MalformedCode(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalDataError {
    #[error("malformed slope content {0:?}: {1}")]
    Syntax(String, String),
    #[error("wild slopes must be weakly increasing ({0} after {1})")]
    Unsorted(String, String),
    #[error("wild slope {0} must exceed 1")]
    SlopeTooSmall(String),
    #[error("tame degree {t} is not coprime to {p}")]
    TameNotCoprime { p: u64, t: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("slope content given twice for prime {0}")]
    DuplicatePrime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MassError {
    #[error("need 0 <= 2s <= n (n={n}, s={s})")]
    SignatureOutOfRange { n: u32, s: u32 },
    #[error("degree {n} >= {p}: wild masses come from the ingested table")]
    NotTame { n: u32, p: u64 },
    #[error("wild mass for n={n}, p={p} not ingested")]
    WildMassMissing { n: u32, p: u64 },
    #[error("wild mass for n={n}, p={p} is only known as a total")]
    TotalOnly { n: u32, p: u64 },
    #[error("exponent c={c} outside 0..={max} for n={n}")]
    ExponentOutOfRange { n: u32, c: u32, max: u32 },
    #[error("no records to compare")]
    EmptyRecords,
    #[error("record {0} has degree different from the comparison degree")]
    DegreeMismatch(u64),
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(
        "a field of degree {degree} with polynomial {polynomial} is already stored (id {existing})"
    )]
    Duplicate {
        degree: u32,
        polynomial: String,
        existing: u64,
    },
    #[error("duplicate {0}")]
    DuplicateRow(String),
    #[error("conflicting {0}")]
    Conflict(String),
    #[error("record violates invariants: {0}")]
    Invalid(String),
    #[error("store file is corrupt: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("invalid search request: {0}")]
    Invalid(String),
}
