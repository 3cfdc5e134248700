use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Domain(String),
    BudgetExceeded(String),
    TruncTooSmall { needed: usize, have: usize },
    DimensionMismatch { computed: usize, expected: usize },
    Diagonalization(String),
    NoLiftMatch(String),
    CoefficientShortage { needed: usize, have: usize },
    IllConditioned(String),
    ZeroCoefficient(String),
    DivisionByZero(String),
    InconclusiveSign { value: f64, tail: f64 },
    NoSignChange,
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::BudgetExceeded(s) => write!(f, "precision budget exceeded: {s}"),
            Error::TruncTooSmall { needed, have } => {
                write!(f, "truncation too small: need {needed}, have {have}")
            }
            Error::DimensionMismatch { computed, expected } => {
                write!(
                    f,
                    "dimension mismatch: computed {computed}, expected {expected}"
                )
            }
            Error::Diagonalization(s) => write!(f, "diagonalization failure: {s}"),
            Error::NoLiftMatch(s) => write!(f, "no lift match: {s}"),
            Error::CoefficientShortage { needed, have } => {
                write!(f, "coefficient table too short: need {needed}, have {have}")
            }
            Error::IllConditioned(s) => write!(f, "ill-conditioned system: {s}"),
            Error::ZeroCoefficient(s) => write!(f, "zero coefficient: {s}"),
            Error::DivisionByZero(s) => write!(f, "division by zero: {s}"),
            Error::InconclusiveSign { value, tail } => {
                write!(
                    f,
                    "inconclusive sign: |value| {value:e} below tail bound {tail:e}"
                )
            }
            Error::NoSignChange => write!(f, "no sign change"),
            Error::Precondition(s) => write!(f, "precondition violated: {s}"),
        }
    }
}

impl core::error::Error for Error {}
