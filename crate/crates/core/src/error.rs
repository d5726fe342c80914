use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition.
    Invalid(String),
    /// A construction could not be completed within the horizon.
    HorizonExhausted { horizon: u64, achieved: usize, detail: String },
    /// Infinite support without a closed-form tail.
    UncertifiedTail,
    /// Iterative solver gave up.
    IllConditioned(String),
    ScaleOutOfResolution { scale: f64, spacing: f64 },
    DegenerateLevel { level: f64, run_start: f64, run_end: f64 },
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid(msg) => write!(f, "invalid input: {msg}"),
            Error::HorizonExhausted { horizon, achieved, detail } => write!(
                f,
                "horizon {horizon} exhausted after {achieved} steps: {detail}"
            ),
            Error::UncertifiedTail => f.write_str("infinite support without a tail certificate"),
            Error::IllConditioned(msg) => write!(f, "ill-conditioned: {msg}"),
            Error::ScaleOutOfResolution { scale, spacing } => write!(
                f,
                "scale {scale:e} is below the grid spacing {spacing:e}"
            ),
            Error::DegenerateLevel { level, run_start, run_end } => write!(
                f,
                "function is flat at level {level} on [{run_start}, {run_end}]"
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
