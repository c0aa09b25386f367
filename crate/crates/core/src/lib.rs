//! Gcd-driven prime-generating recurrences.
//!
//! * [`numtheory`]: gcd, least prime factor, primality, primorials.
//! * [`engine`]: the recurrence state machine and its presets.
//! * [`accel`]: nontrivial increments without the trivial `+1` steps.
//! * [`verify`]: claim checkers producing [`verify::ClaimReport`]s.
//! * [`oeis`]: b-file parsing, cached fetching and sequence comparison.
//! * [`cli`]: the `rowland` command-line front end.

pub mod accel;
pub mod cli;
pub mod engine;
pub mod error;
pub mod numtheory;
pub mod oeis;
pub mod verify;

pub use engine::{GeneratorSpec, Preset, ValidSpec};
pub use error::{Error, Result};
