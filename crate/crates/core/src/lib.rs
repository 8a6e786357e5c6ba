//! Delayed SEIRS mosquito–human epidemic model with nonlinear incidence and
//! distributed delays.
//!
//! The crate works on the dimensionless slow-timescale system in which the
//! vector compartments have been eliminated. It provides:
//!
//! * [`model`]: parameters, the dimensional → dimensionless map, delay
//!   distributions with expectation quadrature, and incidence functions
//!   together with an axiom checker.
//! * [`analysis`]: reproduction numbers, parasite survival expectation,
//!   the endemic equilibrium, extinction rates and permanence floors.
//! * [`simulator`]: explicit Euler integration of the four integro-delay
//!   equations with a history buffer.
//! * [`diagnostics`]: post-processing that checks the asymptotic statements
//!   (extinction rate, mean persistence, feasible region, permanence) on a
//!   finite trajectory.
//! * [`config`] and [`sweep`]: flat key-value scenario files and parameter
//!   sweeps. Sweeps and simulation batches run on rayon when the `parallel`
//!   feature is enabled (the default).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod diagnostics;
mod error;
pub mod exec;
pub mod model;
pub mod simulator;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Execution;
