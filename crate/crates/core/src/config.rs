//! Run configuration shared by the lattice and finite-difference solvers.

use crate::error::{FlowError, Result};

/// Which solver advances the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Smooth lattice, curvature extracted from the rung lengths each stage.
    SlrfV1,
    /// Smooth lattice, curvature carried as evolved state.
    SlrfV2,
    /// Finite-difference reference solver on the (h, m) metric form.
    Fd,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::SlrfV1 => "slrf-v1",
            Method::SlrfV2 => "slrf-v2",
            Method::Fd => "fd",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = FlowError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slrf-v1" => Ok(Method::SlrfV1),
            "slrf-v2" => Ok(Method::SlrfV2),
            "fd" => Ok(Method::Fd),
            other => Err(FlowError::InvalidConfig(format!(
                "unknown method '{other}' (expected slrf-v1, slrf-v2 or fd)"
            ))),
        }
    }
}

/// Time-step selection rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimestepMode {
    /// `dt = C * max_i L_y[i]`. Linear in the grid scale; kept for
    /// reproduction runs. Not parabolically stable in general.
    PaperLiteral,
    /// `dt = C * (min_i L_y[i])^2` (default). The standard Courant form
    /// for an explicit heat-equation step.
    CourantSquared,
}

impl TimestepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TimestepMode::PaperLiteral => "paper-literal",
            TimestepMode::CourantSquared => "courant-squared",
        }
    }
}

impl std::str::FromStr for TimestepMode {
    type Err = FlowError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(TimestepMode::PaperLiteral),
            "courant-squared" => Ok(TimestepMode::CourantSquared),
            other => Err(FlowError::InvalidConfig(format!(
                "unknown timestep_mode '{other}' (expected paper-literal or courant-squared)"
            ))),
        }
    }
}

/// Time integrator for the finite-difference reference solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    /// Forward-time centered-space. Fidelity mode.
    Ftcs,
    /// Classical fourth-order Runge-Kutta. Accuracy mode.
    Rk4,
}

impl FdScheme {
    pub fn as_str(self) -> &'static str {
        match self {
            FdScheme::Ftcs => "ftcs",
            FdScheme::Rk4 => "rk4",
        }
    }
}

impl std::str::FromStr for FdScheme {
    type Err = FlowError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ftcs" => Ok(FdScheme::Ftcs),
            "rk4" => Ok(FdScheme::Rk4),
            other => Err(FlowError::InvalidConfig(format!(
                "unknown fd_scheme '{other}' (expected ftcs or rk4)"
            ))),
        }
    }
}

/// All run parameters.
///
/// `n` is the rail segment count for the lattice solvers (`n + 1` vertices)
/// and the total grid point count for the finite-difference solver.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    /// Initial-data constants of the generating profile.
    pub c3: f64,
    pub c5: f64,
    /// Resolution; see type-level docs.
    pub n: usize,
    /// Azimuthal opening angle of the ladder, radians.
    pub delta_theta: f64,
    /// Courant factor C.
    pub courant_factor: f64,
    pub timestep_mode: TimestepMode,
    /// Ghost vertices extended past each pole (m_g).
    pub ghost_depth: usize,
    /// First vertex index whose value feeds the pole interpolation (n_g).
    /// Vertices closer to a pole than this are filled by interpolation.
    pub interp_start: usize,
    /// Steps between regrids; 0 disables regridding.
    pub regrid_every: usize,
    /// The run stops once dt has dropped below dt_initial / stop_factor.
    pub stop_factor: f64,
    pub method: Method,
    /// Steps between snapshots; 0 disables the step-based cadence.
    pub snapshot_every: usize,
    /// Flow times at which to snapshot (each target fires at the first step
    /// reaching it). May be empty.
    pub snapshot_times: Vec<f64>,
    /// Hard cap on step count; `None` leaves the stop criterion in charge.
    pub max_steps: Option<usize>,
    /// Seed the initial Ricci scalars from the rung lengths instead of the
    /// analytic curvature of the initial metric.
    pub seed_r_from_legs: bool,
    /// Integrator for `Method::Fd`.
    pub fd_scheme: FdScheme,
    /// Fixed time step for `Method::Fd`; `None` selects the adaptive rule.
    pub fd_dt: Option<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            c3: 0.0,
            c5: 0.0,
            n: 100,
            delta_theta: 2.0 * std::f64::consts::PI / 256.0,
            courant_factor: 0.1,
            timestep_mode: TimestepMode::CourantSquared,
            ghost_depth: 4,
            interp_start: 2,
            regrid_every: 10,
            stop_factor: 200.0,
            method: Method::SlrfV1,
            snapshot_every: 0,
            snapshot_times: Vec::new(),
            max_steps: None,
            seed_r_from_legs: false,
            fd_scheme: FdScheme::Rk4,
            fd_dt: None,
        }
    }
}

impl FlowConfig {
    /// Validate the invariants every solver relies on.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(FlowError::InvalidConfig(msg));
        if !(self.c3.is_finite() && self.c5.is_finite()) {
            return fail("c3 and c5 must be finite".into());
        }
        if (1.0 + 3.0 * self.c3 + 5.0 * self.c5).abs() < 1e-12 {
            return fail("1 + 3 c3 + 5 c5 must be nonzero".into());
        }
        match self.method {
            Method::Fd => {
                if self.n < 9 {
                    return fail(format!("fd grid needs n >= 9 points, got {}", self.n));
                }
            }
            _ => {
                if self.n < 8 || self.n % 2 != 0 {
                    return fail(format!(
                        "lattice needs an even segment count n >= 8, got {}",
                        self.n
                    ));
                }
                if self.ghost_depth >= self.n / 2 {
                    return fail(format!(
                        "ghost_depth {} must be < n/2 = {}",
                        self.ghost_depth,
                        self.n / 2
                    ));
                }
            }
        }
        if !(self.delta_theta > 0.0 && self.delta_theta <= std::f64::consts::PI / 8.0) {
            return fail(format!(
                "delta_theta {} must lie in (0, pi/8]",
                self.delta_theta
            ));
        }
        if !(self.courant_factor > 0.0 && self.courant_factor.is_finite()) {
            return fail(format!("courant_factor {} must be > 0", self.courant_factor));
        }
        if self.interp_start == 0 || self.interp_start >= self.ghost_depth {
            return fail(format!(
                "need 0 < interp_start < ghost_depth, got {} and {}",
                self.interp_start, self.ghost_depth
            ));
        }
        if self.stop_factor.is_nan() || self.stop_factor <= 1.0 {
            return fail(format!("stop_factor {} must be > 1", self.stop_factor));
        }
        if let Some(dt) = self.fd_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return fail(format!("fd_dt {dt} must be positive"));
            }
        }
        for &t in &self.snapshot_times {
            if !t.is_finite() || t < 0.0 {
                return fail(format!("snapshot time {t} must be finite and >= 0"));
            }
        }
        Ok(())
    }
}
