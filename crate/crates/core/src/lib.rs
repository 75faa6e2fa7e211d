//! Numerical evaluation of generalized hypergeometric and Fox-Wright series,
//! an inverse-relation engine, a catalog of summation identities, and a
//! randomized harness that verifies them.

pub mod catalog;
pub mod harness;
pub mod inversion;
pub mod numerics;
pub mod notation;
pub mod series;

mod extended;
mod wide;
mod serde_complex;
