use core::fmt;

/// Errors reported by the model, enumeration and witness layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two objective vectors of different dimension were compared.
    DimensionMismatch { left: usize, right: usize },
    /// A point coordinate lies outside the grid range `[-n, n]`.
    OutOfGridRange,
    /// A tuple expected to partition `[n]` does not.
    InvalidPartition,
    /// Solution-set size exceeds the configured enumeration cap.
    CapExceeded { size: u128, cap: u128 },
    /// The requested engine does not apply to this instance.
    EngineMismatch,
    /// A constructor argument violates an invariant.
    InvalidParameter(&'static str),
    /// An operation precondition does not hold.
    Precondition(&'static str),
    /// Exact integer arithmetic overflowed (matrix far beyond supported size).
    IntegerOverflow,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::OutOfGridRange => write!(f, "point outside the grid range [-n, n]"),
            Error::InvalidPartition => write!(f, "index tuples do not partition [n]"),
            Error::CapExceeded { size, cap } => {
                write!(f, "solution set size {size} exceeds enumeration cap {cap}")
            }
            Error::EngineMismatch => write!(f, "engine does not apply to this instance"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::Precondition(what) => write!(f, "precondition violated: {what}"),
            Error::IntegerOverflow => write!(f, "exact integer arithmetic overflow"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
