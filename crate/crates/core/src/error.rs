use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid discriminant -{d_k}: {reason}")]
    InvalidDiscriminant { d_k: i64, reason: &'static str },

    #[error("invalid defining polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("incompatible fields: {0}")]
    Incompatible(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("quotient is not integral")]
    NotIntegral,

    #[error("d_k = {0} is not norm-Euclidean; summand operations need d_k in {{3, 7, 11}}")]
    UnsupportedEuclidean(u64),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("lattice is not positive definite")]
    Indefinite,

    #[error("degenerate Hermitian form")]
    Degenerate,

    #[error("invalid isotropic vector: {0}")]
    InvalidIsotropic(String),

    #[error("point lies outside the symmetric domain (xi = {0})")]
    OutsideDomain(f64),

    #[error("point is within {distance:e} of the divisor (floor {floor:e})")]
    DivisorProximity { distance: f64, floor: f64 },

    #[error("enumeration radius {needed} exceeds the cap {cap}")]
    TruncationCap { needed: f64, cap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
