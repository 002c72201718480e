//! Quantitative refinement for timed modal specifications.
//!
//! The crate implements a specification theory whose systems are finite
//! modal transition systems over interval-timed labels and whose notion of
//! distance is the *maximum lead*: the largest accumulated timing offset
//! between two runs with the same discrete behavior. On top of the label
//! structure it provides
//!
//! * the lead lattice: grid-finitized functions from leads to distances
//!   ([`lattice`]),
//! * interval-timed labels with synchronization, quotient, conjunction and
//!   widening ([`label`]),
//! * trace distances with two independent characterizations ([`trace`]),
//! * finite systems with Boolean refinement, a fixed-point refinement
//!   distance, structural composition, quotient, conjunction, pruning and
//!   implementation enumeration ([`smts`], [`refine`], [`distance`],
//!   [`construct`], [`enumerate`]),
//! * modal event-clock specifications and their finitized interval-timed
//!   semantics ([`mecs`]).
//!
//! All arithmetic is exact: time data are rationals on a configurable grid
//! and distances are computed in integer multiples of the grid step. The
//! crate is `no_std` (it allocates, but performs no IO); parsing, file
//! formats and the command-line front end live in the companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod construct;
pub mod distance;
pub mod enumerate;
pub mod error;
pub mod label;
pub mod lattice;
pub mod mecs;
pub mod refine;
pub mod smts;
pub mod trace;
pub mod value;

pub use error::{Error, Result};
pub use label::{Action, Interval, Symbol, TimedLabel};
pub use lattice::{GridConfig, LeadFunction};
pub use value::{Rational, Value};
