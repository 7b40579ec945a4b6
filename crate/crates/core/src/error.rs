use thiserror::Error;

use crate::bundle::Bundle;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bundle {bundle}: items must lie in 0..{items}")]
    InvalidBundle { bundle: Bundle, items: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size cap exceeded: {what} is {actual}, limit {limit}")]
    SizeCap { what: &'static str, actual: u128, limit: u128 },

    #[error("item count mismatch: expected {expected}, found {found}")]
    ItemCountMismatch { expected: usize, found: usize },

    #[error("invalid valuation: {0}")]
    InvalidValuation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A theorem-backed guarantee did not hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_size(what: &'static str, actual: u128, limit: u128) -> Result<()> {
    if actual > limit {
        Err(Error::SizeCap { what, actual, limit })
    } else {
        Ok(())
    }
}
