//! Crate-wide error type.

use alloc::string::String;
use core::fmt;

/// Errors reported by the core operations. Partiality of the algebraic
/// constructions (quotient, conjunction, pruning) is *not* an error; those
/// return `Option` instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Two lead functions (or systems) built over different grids were mixed.
    GridMismatch,
    /// A time constant, interval endpoint or lead is not a multiple of the
    /// grid step, or a grid parameter violates its invariants.
    Config(String),
    /// A state-space or enumeration budget was exceeded.
    Budget(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GridMismatch => write!(f, "operands use different grid configurations"),
            Error::Config(msg) => write!(f, "configuration error: {}", msg),
            Error::Budget(msg) => write!(f, "budget exceeded: {}", msg),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
