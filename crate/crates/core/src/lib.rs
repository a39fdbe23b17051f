//! Computational toolkit for permutation binomials of small finite fields.
//!
//! The crate is organized around one construction: binomials of the shape
//! `X^n (X^{d(q-1)} + a)` over `F_{q^e}`, together with the machinery needed
//! to test when they permute the field, to reduce them to a canonical form
//! under the usual equivalence (scaling, Frobenius, substitution `X -> v X^s`),
//! and to run reproducible parameter scans.
//!
//! Modules:
//! * [`ff`] — deterministic construction of `F_{p^m}` and element arithmetic.
//! * [`residue`] — arithmetic in `Z/(q-1)` on representatives `{1, ..., q-1}`
//!   and the orbit machinery used for exponent reduction.
//! * [`binomial`] — the binomial type, permutation tests, transforms.
//! * [`canonical`] — canonical triples `(d, n, a_log)` and equivalence.
//! * [`curves`] — the rational map `G`, its bivariate numerator, and point
//!   counting diagnostics.
//! * [`results`] — verdict predicates for known classification results and
//!   the nonexistence scans, with JSON-lines output.
//!
//! Everything is deterministic: a field of a given order always gets the same
//! modulus and the same primitive element, so discrete logs, canonical
//! triples, and scan outputs are stable across runs and machines.

pub mod binomial;
pub mod canonical;
pub mod curves;
mod error;
pub mod ff;
pub mod residue;
pub mod results;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
