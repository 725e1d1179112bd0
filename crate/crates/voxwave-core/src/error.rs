//! Error type shared by all modules of this crate.

use core::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by signal, operator, detection and synthesis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A filter coefficient sequence was empty.
    EmptyFilter,
    /// A filter was longer than the signal it is convolved with.
    FilterLongerThanSignal { filter: usize, signal: usize },
    /// An even-length signal was required.
    OddLength { len: usize },
    /// A length had to be divisible by `divisor` for the requested operation.
    NotDivisible {
        len: usize,
        divisor: usize,
        what: &'static str,
    },
    /// A signal was shorter than the minimum the operation supports.
    SignalTooShort { len: usize, min: usize },
    /// A value that must be finite was NaN or infinite.
    NonFinite { what: &'static str },
    /// A decomposition depth of zero (or deeper than the signal allows).
    BadDepth { depth: usize, len: usize },
    /// Filter coefficients failed a filter-bank invariant.
    BadFilter { reason: &'static str },
    /// A detail level outside `1..=depth` was referenced.
    LevelOutOfRange { level: usize, depth: usize },
    /// Coefficient-set lengths are inconsistent with the stated depth/length.
    PyramidInconsistent {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    /// Two lengths or dimensions that must agree did not.
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },
    /// A matrix buffer did not match its stated dimensions.
    MatrixSizeMismatch { expected: usize, actual: usize },
    /// Statistic requested with too few time points (Fisher requires >= 4).
    BadSampleCount { count: usize, min: usize },
    /// A non-positive sampling interval.
    BadSampleInterval { dt: f64 },
    /// More feature scales requested than exist.
    TooManyScales { requested: usize, available: usize },
    /// A parameter was outside its valid range.
    BadParam {
        name: &'static str,
        reason: &'static str,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyFilter => write!(f, "filter has no coefficients"),
            Error::FilterLongerThanSignal { filter, signal } => write!(
                f,
                "filter length {} exceeds signal length {}",
                filter, signal
            ),
            Error::OddLength { len } => {
                write!(
                    f,
                    "signal length {} is odd, an even length is required",
                    len
                )
            }
            Error::NotDivisible { len, divisor, what } => write!(
                f,
                "length {} is not divisible by {} as required for {}",
                len, divisor, what
            ),
            Error::SignalTooShort { len, min } => {
                write!(f, "signal length {} is below the minimum {}", len, min)
            }
            Error::NonFinite { what } => write!(f, "{} must be finite", what),
            Error::BadDepth { depth, len } => write!(
                f,
                "decomposition depth {} is invalid for signal length {}",
                depth, len
            ),
            Error::BadFilter { reason } => write!(f, "invalid filter pair: {}", reason),
            Error::LevelOutOfRange { level, depth } => {
                write!(f, "detail level {} is outside 1..={}", level, depth)
            }
            Error::PyramidInconsistent {
                what,
                expected,
                actual,
            } => write!(
                f,
                "inconsistent coefficient set: {} has length {}, expected {}",
                what, actual, expected
            ),
            Error::DimensionMismatch { what, left, right } => {
                write!(
                    f,
                    "{}: dimensions {} and {} do not match",
                    what, left, right
                )
            }
            Error::MatrixSizeMismatch { expected, actual } => write!(
                f,
                "matrix buffer holds {} values, dimensions require {}",
                actual, expected
            ),
            Error::BadSampleCount { count, min } => {
                write!(f, "sample count {} is below the minimum {}", count, min)
            }
            Error::BadSampleInterval { dt } => {
                write!(f, "sampling interval {} must be positive and finite", dt)
            }
            Error::TooManyScales {
                requested,
                available,
            } => write!(
                f,
                "{} scales requested but only {} exist",
                requested, available
            ),
            Error::BadParam { name, reason } => write!(f, "parameter {}: {}", name, reason),
        }
    }
}

impl core::error::Error for Error {}
