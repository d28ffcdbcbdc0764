//! Half-integral weight analogues of the Bol operator.
//!
//! The crate provides exact and floating truncated q-series, theta series
//! attached to Dirichlet characters, the `delta_a` operator family with its
//! closed-form expansion, Rankin-Cohen brackets and the Selberg lift,
//! numerical verification of modular transformation laws, and a laboratory
//! for L-series of weakly holomorphic forms defined on test functions.

pub mod arith;
pub mod bol_ops;
pub mod characters;
pub mod error;
pub mod forms;
pub mod lseries;
pub mod modular_verify;
pub mod qseries;
pub mod suites;
pub mod thetas;

pub use error::{Error, Result};
