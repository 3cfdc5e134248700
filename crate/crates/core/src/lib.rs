//! Half-integral weight Hecke eigenforms in the Kohnen plus space, their
//! Shimura lifts, twisted central L-values, and real zeros on the two
//! vertical geodesics of the fundamental domain.
//!
//! Everything here is `no_std` with `alloc`; file formats, caching and the
//! command line live in the `halfint` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod charsums;
pub mod classical;
mod error;
pub mod halfint;
pub mod lfunctions;
pub mod linalg;
pub mod moments;
pub mod ntt;
pub mod numfield;
pub mod qseries;
pub mod specfun;
pub mod zeros;

pub use error::{Error, Result};
pub use qseries::{BigRat, QSeries};
