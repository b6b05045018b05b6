//! Spectral gaps, invariant states and closed-form dynamics of Gaussian
//! quantum Markov semigroups.
//!
//! Comparisons are written as `!(x > 0.0)` where NaN must be rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod gap;
pub mod io;
pub mod linalg;
pub mod model;
pub mod realops;
pub mod report;
pub mod stationary;

pub use error::{Error, Result};
