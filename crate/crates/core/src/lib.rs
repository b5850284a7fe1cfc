//! Discrete-time quantum walks on the line with site-dependent phase coins.
//!
//! [`evolve`] is the production simulator. [`pathsum`] enumerates paths and
//! reduces them with the block product table; [`closedform`] gives the same
//! coefficients in closed form. The three are kept independent so that each
//! checks the others ([`verify`]). [`limit`] holds the weak-limit densities
//! of `X_n / n`, and [`annealed`] averages over random environments.

// `!(x < y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod annealed;
pub mod cli;
pub mod closedform;
pub mod coin;
pub mod environment;
pub mod error;
pub mod evolve;
pub mod io;
pub mod limit;
pub mod pathsum;
pub mod quadrature;
pub mod verify;

pub use coin::{Basis, ChiralityVector, Coin, Mat2};
pub use environment::{Environment, EnvironmentFile, EnvironmentSpec, PhaseMeasure};
pub use error::{Error, Result};
pub use evolve::{evolve_to, Distribution, WalkState};
pub use limit::{ConvergenceReport, LimitDensity};
