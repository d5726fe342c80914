//! Scale and weight functions, best-approximation error sequences, Bernstein
//! class verdicts, the Wiener coefficient model, discrete minimax and graph
//! covering estimates.
//!
//! The crate is `no_std` and needs only `alloc`. All floating point math goes
//! through `libm`, so results are identical on every target.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classes;
pub mod error;
pub mod error_seq;
pub mod exact;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod minimax;
pub mod rates;
pub mod wiener;

pub use error::{Error, Result};

/// Default evaluation horizon.
pub const DEFAULT_HORIZON: u64 = 1_000_000;
