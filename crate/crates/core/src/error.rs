//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by the public API.
///
/// `ShapeViolation` and `Defect` report identities that are guaranteed by
/// the underlying theory; seeing one of them means the implementation is
/// wrong, not the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Characteristic is not a prime number.
    NonPrime(u64),
    /// Characteristic 2 (or smaller) is not supported.
    SmallCharacteristic(u64),
    /// Extension degree must be at least 1.
    BadExtensionDegree(usize),
    /// The requested field does not fit the fixed-width digit arithmetic.
    FieldTooLarge,
    /// Division by zero in a field or ring.
    DivisionByZero,
    /// Operands belong to different contexts (wrong length or parameters).
    ContextMismatch,
    /// Ring element with zero constant term has no inverse.
    NotAUnit,
    /// The parameter pair `(p, n)` is excluded from the construction.
    ExcludedParameters { p: u64, n: usize },
    /// Parse error at a byte offset of the input.
    Syntax {
        offset: usize,
        expected: &'static str,
    },
    /// Generator images whose Jacobian is not a unit do not define an
    /// automorphism.
    JacobianNotUnit,
    /// Automorphism images must have zero constant term.
    ConstantTerm,
    /// The operation is undefined for nilpotent input.
    NilpotentInput,
    /// Moore determinant ratios are undefined when the denominator vanishes.
    DicksonDenominatorZero,
    /// The derivation is not regular.
    NotRegular,
    /// A linear solve that the theory guarantees to succeed did not.
    SolveFailed(&'static str),
    /// Eigenvalues are absent over the current field; retry after extending
    /// by the given degree.
    NeedsFieldExtension { degree: usize },
    /// Index outside the valid range.
    IndexOutOfRange,
    /// Exhaustive enumeration would exceed the configured bound.
    EnumerationTooLarge,
    /// A characteristic polynomial had support outside the p-power degrees.
    ShapeViolation,
    /// An identity guaranteed by the theory failed; fatal by design.
    Defect(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPrime(p) => write!(f, "{p} is not prime"),
            Error::SmallCharacteristic(p) => {
                write!(f, "characteristic {p} is too small (need p > 2)")
            }
            Error::BadExtensionDegree(m) => write!(f, "invalid extension degree {m}"),
            Error::FieldTooLarge => write!(f, "field too large for digit arithmetic"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ContextMismatch => write!(f, "operands from different contexts"),
            Error::NotAUnit => write!(f, "element lies in the maximal ideal and has no inverse"),
            Error::ExcludedParameters { p, n } => {
                write!(f, "parameters (p, n) = ({p}, {n}) are excluded")
            }
            Error::Syntax { offset, expected } => {
                write!(f, "syntax error at byte {offset}: expected {expected}")
            }
            Error::JacobianNotUnit => write!(f, "jacobian of the images lies in the maximal ideal"),
            Error::ConstantTerm => write!(f, "automorphism image has a nonzero constant term"),
            Error::NilpotentInput => write!(f, "operation undefined for nilpotent input"),
            Error::DicksonDenominatorZero => {
                write!(f, "Moore determinant ratio undefined: denominator is zero")
            }
            Error::NotRegular => write!(f, "derivation is not regular"),
            Error::SolveFailed(what) => write!(f, "linear solve failed: {what}"),
            Error::NeedsFieldExtension { degree } => {
                write!(f, "eigenvalues require a degree-{degree} field extension")
            }
            Error::IndexOutOfRange => write!(f, "index out of range"),
            Error::EnumerationTooLarge => {
                write!(f, "exhaustive enumeration exceeds the configured bound")
            }
            Error::ShapeViolation => write!(
                f,
                "characteristic polynomial support violates the p-power shape"
            ),
            Error::Defect(what) => write!(f, "internal defect: {what}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
