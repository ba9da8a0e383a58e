//! Riemann-normal-coordinate machinery for a single computational cell,
//! independent of the flow engine. Verifies the leg-length and tangent
//! expansions, the perturbative cell solution, the rail tangent-continuity
//! residual and the deviation-equation limit that the engine's curvature
//! operator discretizes.
//!
//! All formulas use the 2D curvature realization
//! `R_manb = (R/2)(g_mn g_ab - g_mb g_an)`, the unique symmetric tensor
//! with Ricci scalar `R`.

use crate::config::FlowConfig;
use crate::engine::lattice_laplacian;
use crate::error::{FlowError, Result};
use crate::lattice::LadderLattice;

/// Perturbative-regime guard: `|R| max(leg)^2` must stay below this.
pub const REGIME_LIMIT: f64 = 0.1;

/// Squared geodesic distance between two points in Riemann normal
/// coordinates, to fifth order in the cell scale:
///
/// ```text
/// L^2 = |xj - xi|^2 - (R/6) (xi_x xj_y - xi_y xj_x)^2
/// ```
pub fn rnc_length_sq(xi: [f64; 2], xj: [f64; 2], ricci: f64) -> f64 {
    let dx = xj[0] - xi[0];
    let dy = xj[1] - xi[1];
    let cross = xi[0] * xj[1] - xi[1] * xj[0];
    dx * dx + dy * dy - ricci / 6.0 * cross * cross
}

/// Unit tangent at `xi` of the geodesic running to `xj`, to fourth order
/// in the cell scale. The curvature correction vanishes when `xi` is the
/// coordinate origin.
pub fn rnc_tangent(xi: [f64; 2], xj: [f64; 2], l_ij: f64, ricci: f64) -> Result<[f64; 2]> {
    if !(l_ij > 0.0 && l_ij.is_finite()) {
        return Err(FlowError::InvalidState(format!(
            "geodesic length {l_ij} must be positive"
        )));
    }
    let dx = xj[0] - xi[0];
    let dy = xj[1] - xi[1];
    let c = dy * xi[0] - dx * xi[1];
    Ok([
        (dx + ricci * c / 6.0 * dy) / l_ij,
        (dy - ricci * c / 6.0 * dx) / l_ij,
    ])
}

/// Leg lengths of one ladder cell: the central rung `l_xo`, the two
/// neighboring rungs `l_xp` / `l_xm`, and the rail segments `ds_p` / `ds_m`
/// joining them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellLegs {
    pub l_xo: f64,
    pub l_xp: f64,
    pub l_xm: f64,
    pub ds_p: f64,
    pub ds_m: f64,
}

impl CellLegs {
    pub fn max_leg(&self) -> f64 {
        self.l_xo
            .max(self.l_xp)
            .max(self.l_xm)
            .max(self.ds_p)
            .max(self.ds_m)
    }

    fn validate(&self) -> Result<()> {
        for v in [self.l_xo, self.l_xp, self.l_xm, self.ds_p, self.ds_m] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::InvalidState(format!(
                    "cell legs must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One solved cell: legs, curvature and the Riemann normal coordinates of
/// the off-axis vertices. By the cell symmetry the seven vertices are
/// `o = (0,0)`, `a = (l_xo/2, 0)`, `d = (-l_xo/2, 0)`, `b = (x_b, y_b)`,
/// `c = (-x_b, y_b)`, `f = (x_f, y_f)`, `e = (-x_f, y_f)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub legs: CellLegs,
    pub ricci: f64,
    pub x_b: f64,
    pub y_b: f64,
    pub x_f: f64,
    pub y_f: f64,
}

/// Solve the cell's leg-length equations for the vertex coordinates to
/// first order in the curvature.
///
/// At order R^0 the cell is flat: `x = L_x/2` and
/// `y^2 = ds^2 - (l_xo - l_x)^2 / 4`. The O(R) corrections follow from
/// expanding the squared-length relation [`rnc_length_sq`] for the four
/// off-axis legs:
///
/// ```text
/// x   = L/2 + w0 L R / 24
/// y^2 = w0 (1 + (l_xo^2 + L l_xo - L^2) R / 24)
/// ```
///
/// with `w0 = ds^2 - (l_xo - L)^2 / 4` for the matching side.
pub fn solve_cell_perturbative(legs: CellLegs, ricci: f64) -> Result<CellGeometry> {
    legs.validate()?;
    let scale = legs.max_leg();
    let regime = ricci.abs() * scale * scale;
    if regime >= REGIME_LIMIT {
        return Err(FlowError::PerturbativeRegime(regime));
    }

    let side = |l: f64, ds: f64| -> Result<(f64, f64)> {
        let w0 = ds * ds - 0.25 * (legs.l_xo - l) * (legs.l_xo - l);
        let x = 0.5 * l + w0 * l * ricci / 24.0;
        let y2 = w0 * (1.0 + (legs.l_xo * legs.l_xo + l * legs.l_xo - l * l) * ricci / 24.0);
        if y2 < -1e-12 * ds * ds {
            return Err(FlowError::InconsistentCell(y2));
        }
        Ok((x, y2.max(0.0).sqrt()))
    };
    let (x_b, y_b) = side(legs.l_xp, legs.ds_p)?;
    let (x_f, y_f) = side(legs.l_xm, legs.ds_m)?;
    Ok(CellGeometry {
        legs,
        ricci,
        x_b,
        y_b,
        x_f,
        y_f,
    })
}

/// Residuals of the four off-axis leg lengths when the solved coordinates
/// are substituted back into [`rnc_length_sq`]: `(bc, ef, ab, af)` as
/// differences of squared lengths. O(R^2) for an admissible cell.
pub fn cell_length_residuals(cell: &CellGeometry) -> [f64; 4] {
    let a = [0.5 * cell.legs.l_xo, 0.0];
    let b = [cell.x_b, cell.y_b];
    let c = [-cell.x_b, cell.y_b];
    let f = [cell.x_f, cell.y_f];
    let e = [-cell.x_f, cell.y_f];
    [
        rnc_length_sq(b, c, cell.ricci) - cell.legs.l_xp * cell.legs.l_xp,
        rnc_length_sq(e, f, cell.ricci) - cell.legs.l_xm * cell.legs.l_xm,
        rnc_length_sq(a, b, cell.ricci) - cell.legs.ds_p * cell.legs.ds_p,
        rnc_length_sq(a, f, cell.ricci) - cell.legs.ds_m * cell.legs.ds_m,
    ]
}

/// The x-component of the rail tangent-continuity condition at vertex `a`,
/// requiring the two rail segments meeting there to continue one geodesic:
///
/// ```text
/// res = (l_xp - l_xo)/(2 ds_p) + (l_xm - l_xo)/(2 ds_m)
///     - (2 l_xo + l_xp)((l_xo - l_xp)^2 - 4 ds_p^2) R / (96 ds_p)
///     - (2 l_xo + l_xm)((l_xo - l_xm)^2 - 4 ds_m^2) R / (96 ds_m)
/// ```
///
/// This is a nonuniform finite-difference approximation of the deviation
/// ODE checked by [`deviation_ode_residual`].
pub fn tangent_continuity_residual(cell: &CellGeometry) -> f64 {
    let CellLegs {
        l_xo,
        l_xp,
        l_xm,
        ds_p,
        ds_m,
    } = cell.legs;
    let r = cell.ricci;
    0.5 * (l_xp - l_xo) / ds_p + 0.5 * (l_xm - l_xo) / ds_m
        - (2.0 * l_xo + l_xp) * ((l_xo - l_xp) * (l_xo - l_xp) - 4.0 * ds_p * ds_p) * r
            / (96.0 * ds_p)
        - (2.0 * l_xo + l_xm) * ((l_xo - l_xm) * (l_xo - l_xm) - 4.0 * ds_m * ds_m) * r
            / (96.0 * ds_m)
}

fn check_uniform_grid(l: &[f64], ricci: &[f64], s: &[f64]) -> Result<f64> {
    let n = s.len();
    if l.len() != n || ricci.len() != n || n < 5 {
        return Err(FlowError::InvalidState(format!(
            "profiles need >= 5 matching samples, got {} / {} / {}",
            l.len(),
            ricci.len(),
            n
        )));
    }
    let h = s[1] - s[0];
    if h.is_nan() || h <= 0.0 {
        return Err(FlowError::NonincreasingAbscissae(0));
    }
    for i in 1..n - 1 {
        let hi = s[i + 1] - s[i];
        if (hi - h).abs() > 1e-9 * h {
            return Err(FlowError::InvalidState(format!(
                "grid must be uniform: spacing {hi} vs {h} at {i}"
            )));
        }
    }
    Ok(h)
}

/// Residual of the full rail ODE
/// `L'' + (1/2) R L - (1/8) R L (L')^2` on a fine uniform grid, evaluated
/// with fourth-order centered stencils at the interior samples
/// `2 ..= n - 3` (returned in that order).
pub fn deviation_ode_residual(l: &[f64], ricci: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    let h = check_uniform_grid(l, ricci, s)?;
    Ok((2..l.len() - 2)
        .map(|i| {
            let d1 = (l[i - 2] - 8.0 * l[i - 1] + 8.0 * l[i + 1] - l[i + 2]) / (12.0 * h);
            let d2 = (-l[i - 2] + 16.0 * l[i - 1] - 30.0 * l[i] + 16.0 * l[i + 1] - l[i + 2])
                / (12.0 * h * h);
            d2 + 0.5 * ricci[i] * l[i] - 0.125 * ricci[i] * l[i] * d1 * d1
        })
        .collect())
}

/// Residual of the geodesic deviation equation `L'' + (1/2) R L`, the
/// small-slope limit of [`deviation_ode_residual`]. Same grid and stencils.
pub fn geodesic_deviation_residual(l: &[f64], ricci: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    let h = check_uniform_grid(l, ricci, s)?;
    Ok((2..l.len() - 2)
        .map(|i| {
            let d2 = (-l[i - 2] + 16.0 * l[i - 1] - 30.0 * l[i] + 16.0 * l[i + 1] - l[i + 2])
                / (12.0 * h * h);
            d2 + 0.5 * ricci[i] * l[i]
        })
        .collect())
}

/// Largest deviation of the engine's lattice Laplacian from a known
/// continuum Laplacian, over all vertices. Test support.
pub fn laplacian_identity_check(
    lattice: &LadderLattice,
    config: &FlowConfig,
    f: &[f64],
    expected: &[f64],
) -> Result<f64> {
    if expected.len() != f.len() {
        return Err(FlowError::InvalidState(
            "expected-Laplacian length mismatch".into(),
        ));
    }
    let lap = lattice_laplacian(f, lattice, config)?;
    Ok(lap
        .iter()
        .zip(expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
