//! Rényi α-relative entropy of coherence.
//!
//! Quantifiers of coherence with respect to a fixed basis, incoherent Kraus
//! channels, checkers for the monotonicity axioms, closed-form single-qubit
//! results, and reproducible parameter sweeps.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod channel;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod qubit;
pub mod sampling;
pub mod scenarios;
pub mod simplex;
pub mod table;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DensityMatrix, Spectrum};
