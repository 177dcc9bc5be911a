use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("size guard exceeded: {what} needs {needed}, limit is {limit}")]
    SizeGuard {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field is not an extension")]
    NotAnExtension,
    #[error("field does not lie in the tower")]
    NotInTower,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tensor order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
    #[error("not enough rational points: need {needed}, have {available}")]
    NotEnoughPoints { needed: u64, available: u64 },
    #[error("tower mismatch: {0}")]
    TowerMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("config error: {0}")]
    ConfigError(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

/// Fails with [`Error::SizeGuard`] when `needed` exceeds `limit`.
pub(crate) fn guard(what: &'static str, needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::SizeGuard {
            what,
            needed,
            limit,
        })
    } else {
        Ok(())
    }
}

/// Default enumeration budget for exhaustive operations.
pub const OP_BUDGET: u128 = 100_000_000;
