//! Symbolic-numeric analysis of completely integrable ODE systems: Nambu and
//! Poisson brackets, Hamilton-Poisson realizations, the linearizing chart built
//! from the first integrals and a rescaling, and Lie symmetries generated from
//! the kernel of the Euler field.

// `!(a > b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod linearize;
pub mod symexpr;
pub mod symgen;
pub mod vcalc;

pub use error::{Error, Result};
