#![cfg_attr(not(feature = "std"), no_std)]

//! Explicit data-driven predictive control.
//!
//! This crate turns recorded input/state data of an unknown linear
//! time-invariant system into an explicit piecewise-affine predictive
//! controller, with no intermediate model-identification step. The offline
//! pipeline is
//!
//! 1. [`data`]: ingest experiments, average repeated runs, verify that the
//!    input is persistently exciting and that the stacked data matrix has
//!    full rank;
//! 2. [`predictor`]: build the one-step predictor from the data and stack it
//!    into free/forced response matrices over the prediction horizon;
//! 3. [`terminal`]: pick the terminal penalty (Lyapunov or LQR design, both
//!    computed from the data-driven predictor);
//! 4. [`mpqp`]: condense cost and constraints into a multi-parametric
//!    quadratic program in the completed-squares variable;
//! 5. [`explicit`]: enumerate active constraint sets, solve each in closed
//!    form and assemble the polyhedral partition;
//! 6. [`runtime`]: evaluate the stored law online by scanning the partition.
//!
//! The crate is `no_std`-compatible (allocator required). File formats, the
//! command-line front end, benchmark plants and the simulation harness live
//! in the companion `eddpc-lab` crate.

extern crate alloc;

pub mod data;
pub mod error;
pub mod explicit;
pub mod linalg;
pub mod mpqp;
pub mod polyhedra;
pub mod predictor;
pub mod runtime;
pub mod terminal;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
