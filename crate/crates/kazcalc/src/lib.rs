//! Exact calculator for the rational structure of cobordism groups of
//! singular maps of corank one.
//!
//! Pipeline: truncated integer series (`series`) feed the classifying-space
//! tables (`rings`); the spectral-sequence engine (`kazarian`) produces
//! homology rank series that `cobordism`, `thom` and `bordism` turn into
//! group ranks, obstruction ranks, polynomial tables and generating
//! functions; `consistency` replays every closed form against the engine and
//! `cli` exposes the whole surface as a command-line tool.
//!
//! Every number is an exact integer; there is no floating point anywhere.

// Parity tests are written `x % 2 == 0` throughout: parity of degrees is the
// central case split of the whole computation.
#![allow(clippy::manual_is_multiple_of)]

pub mod bordism;
pub mod cli;
pub mod cobordism;
pub mod consistency;
pub mod error;
pub mod kazarian;
pub mod rings;
pub mod series;
pub mod thom;

pub use error::{Error, Result};
