//! Desk-scale simulation of decoupling-based deconstruction and conditional
//! erasure protocols.
//!
//! The crate builds the protocol unitaries explicitly (Haar sampling, partial
//! isometries, Heisenberg–Weyl twirls, Uhlmann alignment), measures every
//! trace-norm error along the way, and evaluates the closed-form error bounds
//! and rate formulas they are compared against.
//!
//! Module map:
//! - [`tensor`]: labeled tensor layouts, dense operators, spectral routines.
//! - [`states`]: density operators, pure states, purification, n-copy grouping.
//! - [`entropy`]: von Neumann and sandwiched Rényi conditional entropies, CMI.
//! - [`unitaries`]: Haar unitaries, Heisenberg–Weyl sets, `T_W`, Uhlmann unitary.
//! - [`protocol`]: the protocol construction and its measured errors.
//! - [`bounds`]: Ξ, ε_n, ϑ_n and the rate formulas.
//! - [`harness`]: sweeps, records, configuration and the acceptance checks.
//!
//! All logarithms are base 2.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod protocol;
pub mod rng;
mod sentinel;
pub mod states;
pub mod tensor;
pub mod unitaries;

pub use error::{Error, Result};
