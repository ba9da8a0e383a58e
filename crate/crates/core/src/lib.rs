//! Ricci flow of axisymmetric S^2 geometries by the smooth lattice method,
//! with a finite-difference reference solver and isometric embedding
//! reconstruction.
//!
//! The lattice state is a ladder: two pole-to-pole geodesic rails joined by
//! transverse rungs, with the Ricci scalar carried per vertex. Curvature is
//! either extracted from the rung lengths through the geodesic deviation
//! relation (method 1, [`engine::rk4_step_v1`]) or evolved alongside the
//! legs (method 2, [`engine::rk4_step_v2`]). The [`fd`] module provides an
//! independent solver on the metric coefficients `(h, m)` for
//! cross-validation, and [`embed`] reconstructs the generating curve of
//! either representation in E^3.

pub mod config;
pub mod embed;
pub mod engine;
pub mod error;
pub mod fd;
pub mod lattice;
pub mod profile;
pub mod rnc;
pub mod stencil;

pub use config::{FdScheme, FlowConfig, Method, TimestepMode};
pub use embed::{curve_distance, embed_lattice, embed_metric, GeneratingCurve, DEFAULT_TOL_EMBED};
pub use engine::{run_flow, FlowRun, StepDiagnostics, Termination};
pub use error::{FlowError, Result};
pub use fd::{run_fd, FdRun, MetricGrid};
pub use lattice::{extend_over_poles, init_lattice, GhostView, LadderLattice};
pub use profile::InitialProfile;
