//! Batch driver for the smooth-lattice Ricci flow solvers. The binary is a
//! thin wrapper over this library so the integration and acceptance suites
//! can drive the same code paths directly.

pub mod args;
pub mod cell;
pub mod compare;
pub mod error;
pub mod output;
pub mod runner;
pub mod settings;

pub use error::{CliError, Result};
