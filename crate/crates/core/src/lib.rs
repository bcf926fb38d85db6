//! Exact limiting *-moments and free cumulants of sample cross-covariance
//! matrices and their centered-scaled elliptic limits.
//!
//! Everything in this crate is exact: scalars are arbitrary-precision
//! rationals, moment/cumulant transforms run over explicitly enumerated
//! non-crossing partitions, and the named limit laws come with independent
//! closed forms that the generic engine is tested against.
//!
//! The crate is organized as:
//! - [`partition`]: non-crossing (pair) partitions, refinement order,
//!   Kreweras complement, Möbius function, Catalan numbers;
//! - [`word`]: *-words over a family of labelled symbols;
//! - [`cumulant`]: moment↔cumulant transforms and the cross-covariance /
//!   elliptic family functionals;
//! - [`laws`]: closed-form moment and cumulant sequences of the named
//!   limit laws (Marčenko–Pastur and friends);
//! - [`poly`]: noncommutative *-polynomials, their text syntax, and moment
//!   evaluation under any backend;
//! - [`limit`]: centered-scaled limits of polynomials in raw symbols,
//!   with square-root coefficients carried exactly.

pub mod cumulant;
pub mod error;
pub mod laws;
pub mod limit;
pub mod partition;
pub mod poly;
pub mod scalar;
pub mod word;

pub use error::{Error, Result};
pub use scalar::Rat;
