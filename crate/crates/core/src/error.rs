use alloc::string::String;
use core::fmt;

/// Errors raised by the core library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Operands live in different coefficient fields.
    SpecMismatch,
    DivisionByZero,
    NotPrime(u64),
    Parse(String),
    /// Leading/trailing data requested from the zero polynomial.
    ZeroPolynomial,
    OutOfRange(String),
    /// Expansion or enumeration would exceed the configured budget.
    Budget { needed: u128, limit: u128 },
    FieldTooSmall { needed: u128, have: u128 },
    /// The axiom system has a boolean solution, so no refutation exists.
    Satisfiable(String),
    NotDivisible(String),
    InvalidCertificate(String),
    OrderMismatch,
    Partition(String),
    Precondition(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SpecMismatch => write!(f, "field spec mismatch"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::NotPrime(p) => write!(f, "{p} is not prime"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::ZeroPolynomial => write!(f, "zero polynomial has no extremal monomial"),
            Error::OutOfRange(m) => write!(f, "out of range: {m}"),
            Error::Budget { needed, limit } => {
                write!(f, "budget exceeded: needs {needed}, limit {limit}")
            }
            Error::FieldTooSmall { needed, have } => {
                write!(f, "field too small: need {needed} elements, have {have}")
            }
            Error::Satisfiable(m) => write!(f, "system is satisfiable: {m}"),
            Error::NotDivisible(m) => write!(f, "not divisible: {m}"),
            Error::InvalidCertificate(m) => write!(f, "invalid certificate: {m}"),
            Error::OrderMismatch => write!(f, "variable order mismatch"),
            Error::Partition(m) => write!(f, "bad partition: {m}"),
            Error::Precondition(m) => write!(f, "precondition failed: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
