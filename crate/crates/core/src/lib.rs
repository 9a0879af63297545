//! Exact-arithmetic Cantor sets, cut-out sets and doubling measures on the
//! unit interval, with certificates of fatness and thinness.
//!
//! The crate is `no_std` (it needs `alloc`). All decisions are made in exact
//! rational arithmetic; irrational constants are carried as certified
//! [`real::Bracket`] enclosures.

#![no_std]

extern crate alloc;

pub mod error;
pub mod certify;
pub mod doubling;
pub mod geom;
pub mod measure;
pub mod qs;
pub mod rational;
pub mod real;
pub mod seq;

pub use error::{Error, Result};
pub use rational::Rational;
pub use real::Bracket;
