use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("form is not positive definite")]
    NotPositiveDefinite,

    #[error("negative enumeration bound {0}")]
    NegativeBound(i64),

    #[error("form has rank {rank} mod {p}, expected rank 1")]
    RankNotOne { p: i64, rank: usize },

    #[error("form is degenerate mod {0}")]
    DegenerateModP(i64),

    #[error("lattice basis is rank deficient")]
    RankDeficient,

    #[error("lattice is not an order: {0}")]
    NotAnOrder(&'static str),

    #[error("lattice index is not a rational square")]
    IndexNotSquare,

    #[error("brandt matrix index {n} shares a factor with level {level}")]
    BrandtNotCoprime { n: i64, level: i64 },

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("discriminant {d} is not admissible for family {family}")]
    Inadmissible { d: i64, family: String },

    #[error("coefficient index {required} exceeds computed bound {bound}")]
    BoundTooSmall { required: i64, bound: i64 },

    #[error("series length {required} exceeds coefficient budget {budget}")]
    OracleBudget { required: usize, budget: usize },

    #[error("unsupported gcd pattern for D = {d} at level {level}")]
    UnsupportedGcd { d: i64, level: i64 },

    #[error("no auxiliary prime below {bound} satisfies the family conditions")]
    NoAuxiliaryPrime { bound: i64 },

    #[error("calibration failed: {0}")]
    Calibration(&'static str),

    #[error("eigenform is identically zero up to bound {0}")]
    ZeroEigenform(i64),

    #[error("not enough usable discriminants: need {need}, found {found}")]
    TooFewProbes { need: usize, found: usize },

    #[error("fixture parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("fixture has no section [{0}]")]
    MissingSection(&'static str),

    #[error("fixture has no family named {0}")]
    UnknownFamily(String),

    #[error("fixture has no ideal class representatives")]
    NoIdeals,

    #[error("verification mismatch: {0}")]
    Mismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
