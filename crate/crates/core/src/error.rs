//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by construction, arithmetic, and verification routines.
///
/// Every fallible operation in the crate returns this type; panics are
/// reserved for internal invariant violations that no input can trigger.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two operands live in cyclotomic fields of different root order.
    #[error("root orders differ: {0} vs {1}")]
    MismatchedOrder(usize, usize),

    /// Attempted to invert zero in Q(zeta_N).
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(usize),

    /// A divisibility query needs an algebraic integer but a coordinate has
    /// a nontrivial denominator.
    #[error("value is not integral: coordinate {index} equals {value}")]
    NotIntegral { index: usize, value: String },

    /// An exponent that must be an integer came out fractional.
    #[error("exponent {numerator}/{denominator} is not an integer")]
    NonIntegralExponent { numerator: i64, denominator: i64 },

    /// A series that must be an ordinary power series has a pole at q = 0.
    #[error("series has negative minimal exponent {0}")]
    NegativeMinExp(i64),

    /// The truncation-height rule failed its doubling check.
    #[error(
        "stabilization failed: heights {height} and {height_plus} disagree at n = {n}"
    )]
    StabilizationFailed {
        height: i64,
        height_plus: i64,
        n: usize,
    },

    /// A routine that requires a prime argument received a composite.
    #[error("{0} is not prime")]
    NotPrime(u64),

    /// The modulus divides a quantity that must be a unit mod p.
    #[error("p = {p} divides {what}")]
    DividesModulus { p: u64, what: String },

    /// The star-set legality conditions do not hold for these parameters.
    #[error("star conditions not met: {0}")]
    StarGate(String),

    /// Catch-all for violated preconditions with a human-readable cause.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A serialized value failed to decode.
    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;
