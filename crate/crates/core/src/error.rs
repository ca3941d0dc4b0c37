use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates a documented constraint. The message names it.
    InvalidParameter(String),
    /// The computation produced a non-finite or non-positive normalizer.
    NumericalFailure(&'static str),
    /// The average-case bound hit a term with `f_i = 1`; the bound carries
    /// no information at this message count.
    DegenerateBound { insertion: u64 },
    /// The requested quantity has no model for this variant.
    Unsupported(&'static str),
    /// No parameter choice in the search space meets the target.
    NoFeasibleConfiguration,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NumericalFailure(what) => write!(f, "numerical failure: {what}"),
            Error::DegenerateBound { insertion } => write!(
                f,
                "average-case bound is degenerate: insertion {insertion} is a certain false positive"
            ),
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::NoFeasibleConfiguration => f.write_str("no configuration meets the target"),
        }
    }
}

impl core::error::Error for Error {}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::Error::InvalidParameter(alloc::format!($($fmt)+)));
        }
    };
}

pub(crate) use ensure;
