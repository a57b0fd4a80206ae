//! Simulation lab and tooling around `eddpc-core`: dataset file formats,
//! controller bundles, benchmark plants (including the nonlinear quadrotor),
//! the model-based oracle pipeline, a reference QP solver used as an
//! independent check of the explicit laws, and the `eddpc` command-line
//! front end.

pub mod bench;
pub mod bundle;
pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod plant;
pub mod quadrotor;

pub use error::{LabError, Result};
