//! Exact regularized iterated integrals of quasimodular forms for `SL2(Z)`.
//!
//! The crate computes iterated integrals `I(f1,…,fn; τ)` as truncated
//! q-expansions with `log q` terms, rewrites combinations of them into the
//! polynomial algebra of Lyndon words over the Eisenstein basis, and checks
//! the Eichler–Shimura and braid-group cocycles numerically.

pub mod canonicalize;
pub mod cli;
pub mod cocycles;
pub mod error;
pub mod iterint;
pub mod linalg;
pub mod qseries;
pub mod quasimodular;
pub mod shuffle_lyndon;

pub use error::{Error, Result};
pub use qseries::{LogQSeries, QSeries, Rational};
pub use quasimodular::QMPoly;
