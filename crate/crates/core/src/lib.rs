//! Simulation and verification toolkit for 1+1-dimensional directed polymers
//! in an i.i.d. random environment.
//!
//! The crate is organised bottom-up:
//!
//! - [`env`]: lattice sites, windows and reproducible weight fields.
//! - [`partition`]: point-to-point and tilted point-to-line free energies
//!   by log-space dynamic programming, plus an enumeration oracle.
//! - [`cocycle`]: finite-horizon Busemann fields, their algebraic identities,
//!   shape-function estimates and the point-to-line duality.
//! - [`gibbs`]: polymer path measures, backward and forward Markov chains,
//!   DLR consistency, large deviations and rooted-mass decay.
//! - [`coupling`]: walks coupled through a shared uniform field; ordering,
//!   coalescence and junction statistics.
//! - [`cif`]: the spanning tree of backward chains and its competition interface.
//! - [`experiment`]: configuration-driven experiment runner and reports.

// Sites are partially ordered; `!(x <= y)` includes incomparable pairs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cif;
pub mod cocycle;
pub mod coupling;
pub mod csv;
pub mod env;
mod error;
pub mod experiment;
pub mod gibbs;
pub mod partition;
pub mod stats;

pub use error::{Error, Result};
