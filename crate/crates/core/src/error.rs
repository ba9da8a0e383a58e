use thiserror::Error;

/// Errors raised by lattice construction, flow stepping and embedding.
///
/// The crate-wide policy is to fail fast: any operation that receives a NaN
/// or a nonpositive required length reports an error instead of letting the
/// bad value propagate through the stencils.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FlowError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate initial surface: {0}")]
    DegenerateInitialData(String),

    #[error("invalid lattice state: {0}")]
    InvalidState(String),

    #[error("stencil index {index} has no neighbors in range 0..{len}")]
    StencilOutOfRange { index: usize, len: usize },

    #[error("nonincreasing abscissae at index {0}")]
    NonincreasingAbscissae(usize),

    #[error("interpolation abscissae coincide: s^2 = {0}")]
    CoincidentAbscissae(f64),

    #[error("interpolation target s = {target} outside sample range |s| <= {max}")]
    InterpTargetOutOfRange { target: f64, max: f64 },

    #[error("nonpositive rung length L_x[{index}] = {value} inside differentiated range")]
    NonpositiveRung { index: usize, value: f64 },

    #[error("time step {0} is not positive and finite")]
    InvalidTimestep(f64),

    #[error("flow produced a nonpositive rail segment: L_y[{index}] = {value}")]
    RailCollapse { index: usize, value: f64 },

    #[error("metric coefficient m <= 0 at interior grid point {index} (m = {value})")]
    MetricCollapse { index: usize, value: f64 },

    #[error("metric coefficient h <= 0 at grid point {index} (h = {value})")]
    LostPositivity { index: usize, value: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("surface not realizable as a revolution graph at this resolution: {0}")]
    EmbeddingFailed(String),

    #[error("cell outside perturbative regime: |R| max(leg)^2 = {0} >= 0.1")]
    PerturbativeRegime(f64),

    #[error("inconsistent cell: y^2 = {0} is negative beyond tolerance")]
    InconsistentCell(f64),
}

pub type Result<T> = std::result::Result<T, FlowError>;
