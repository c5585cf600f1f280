//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The requested base field is not one of the implemented ones.
    #[error(
        "field not supported: {0:?}; only the class-number-one, norm-Euclidean fields \
         Q, Q(i), Q(sqrt(-2)), Q(sqrt(-3)), Q(sqrt(-7)), Q(sqrt(-11)), Q(sqrt(2)), Q(sqrt(5)) \
         are implemented (ideals must be principal and gcd must be Euclidean)"
    )]
    UnsupportedField(String),

    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An interval comparison did not separate even at the maximal precision.
    #[error("certified comparison undecided at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    /// The requested height bound exceeds the configured limit of an oracle.
    #[error("refusing {what} at B = {requested}: configured limit is {limit}")]
    LimitExceeded {
        what: String,
        requested: String,
        limit: String,
    },

    /// A numerical routine could not reach the requested accuracy.
    #[error("error budget exceeded in {context}: achieved {achieved:.3e}, requested {requested:.3e}")]
    BudgetExceeded {
        context: String,
        achieved: f64,
        requested: f64,
    },

    /// A violated internal invariant; never expected.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
