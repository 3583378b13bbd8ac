//! One error type for the whole crate; variants say what was violated, not
//! where it happened.

use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector or matrix had a size incompatible with the operation.
    DimensionMismatch { expected: usize, found: usize },
    /// A coordinate was NaN or infinite where a finite value is required.
    NonFinite(&'static str),
    /// A parameter failed its domain constraint (λ > 0, t0 > 0, ...).
    InvalidParameter { name: &'static str, reason: String },
    /// The linear part of an affine operator is not monotone: the smallest
    /// eigenvalue of its symmetric part is below the construction tolerance.
    NotMonotone { min_eigenvalue: f64 },
    /// A direct solve hit a (numerically) singular matrix.
    SingularMatrix,
    /// The supplied point is not fixed by the resolvent, so it cannot be a
    /// certified zero of the operator.
    KnownZeroNotFixed { deviation: f64 },
    /// Forward evaluation was requested on an operator that is set-valued
    /// (the subdifferential catalog rules `abs` and `box`).
    SetValuedOperator,
    /// The requested construction has no closed-form resolvent; the catalog
    /// only ships exact resolvent oracles.
    NoClosedFormResolvent(&'static str),
    /// Adaptive step size shrank below representable resolution.
    StepSizeUnderflow { t: f64 },
    /// The integrator exceeded its accepted-step budget.
    StepBudgetExceeded { t: f64 },
    /// A trajectory did not satisfy the structural invariants expected by a
    /// diagnostics routine (wrong index kind, missing fields, too short).
    InvalidTrajectory(&'static str),
    /// A numerical classification could not be decided on the given range.
    Inconclusive(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::NotMonotone { min_eigenvalue } => write!(
                f,
                "linear part is not monotone: symmetric part has eigenvalue {min_eigenvalue:e}"
            ),
            Error::SingularMatrix => write!(f, "singular matrix in direct solve"),
            Error::KnownZeroNotFixed { deviation } => write!(
                f,
                "claimed zero is not fixed by the resolvent (deviation {deviation:e})"
            ),
            Error::SetValuedOperator => {
                write!(f, "operator is set-valued; raw forward evaluation undefined")
            }
            Error::NoClosedFormResolvent(what) => {
                write!(f, "no closed-form resolvent for {what}")
            }
            Error::StepSizeUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            Error::StepBudgetExceeded { t } => {
                write!(f, "integrator step budget exceeded at t = {t}")
            }
            Error::InvalidTrajectory(why) => write!(f, "invalid trajectory: {why}"),
            Error::Inconclusive(what) => write!(f, "inconclusive classification: {what}"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub(crate) fn bad_param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
