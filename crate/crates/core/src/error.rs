use std::fmt;

use crate::scalar::Rational;

/// Parameter combinations for which a closed-form route has no formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degeneracy {
    /// `x_n = W_1 - r W_{n+1}` vanishes, so the characteristic quadratic collapses.
    XnZero,
    /// `W_1 = a` vanishes.
    AZero,
    /// `g_n` vanishes, so the `h_n / g_n` elimination step is undefined.
    GnZero,
    /// The Schur pivot `l` of the block inverse vanishes.
    LZero,
    /// `r = 0`; the twist root and the `1/r` coefficient relations are undefined.
    TwistZero,
}

impl Degeneracy {
    pub fn as_str(self) -> &'static str {
        match self {
            Degeneracy::XnZero => "x_n = 0",
            Degeneracy::AZero => "a = 0",
            Degeneracy::GnZero => "g_n = 0",
            Degeneracy::LZero => "l = 0",
            Degeneracy::TwistZero => "r = 0",
        }
    }
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("mismatched quadratic extensions: delta {left} vs {right}")]
    MismatchedExtension { left: Rational, right: Rational },

    #[error("division by zero")]
    DivisionByZero,

    #[error("unknown preset {0:?} (expected fibonacci, jacobsthal, pell, tribonacci or skew-tribonacci)")]
    UnknownPreset(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("Schur pivot l vanishes; block inverse undefined")]
    SingularBlock,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(Degeneracy),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("order n = {n} is below the minimum {min} for this method")]
    UnsupportedOrder { n: usize, min: usize },

    #[error("internal verification failure: {0}")]
    InternalVerificationFailure(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
