//! Large sieve experiments over sparse sets of moduli.
//!
//! The crate measures the sieve sum `Σ_{q∈𝒮} Σ_{(a,q)=1} |S(a/q)|²` for
//! finite coefficient sequences and compares it with the known bound
//! shapes. Supporting modules count Farey fractions in short windows, solve
//! the quadratic congruences that govern square moduli, and check the
//! harmonic-analysis identities behind the square-moduli estimates.

pub mod arith;
pub mod bounds;
pub mod cli;
pub mod counting;
pub mod error;
pub mod harmonic;
pub mod moduli;
pub mod oracle;
pub mod phase;
pub mod report;
pub mod sequence;
pub mod verify;

pub use error::{Error, Result};
