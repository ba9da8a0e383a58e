//! Isometric embedding of the axisymmetric geometries in E^3.
//!
//! Both solvers reduce to a planar generating curve (x_i, y_i) whose
//! rotation about the x-axis reproduces the surface. The metric route
//! integrates `x' = sqrt(h - (m')^2 / 4m)` with `y = sqrt(m)`; the lattice
//! route chains vertices directly from the leg lengths, recovering the
//! ladder opening angle from the first rung.

use crate::config::Method;
use crate::error::{FlowError, Result};
use crate::fd::MetricGrid;
use crate::lattice::LadderLattice;

/// Default embeddability tolerance, relative to the local leg scale.
pub const DEFAULT_TOL_EMBED: f64 = 1e-9;

/// Which solver produced the embedded snapshot.
pub type CurveSource = Method;

/// Planar generating curve of a surface of revolution about the x-axis,
/// centered so the equator vertex sits at x = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingCurve {
    pub t: f64,
    pub source: CurveSource,
    pub points: Vec<[f64; 2]>,
}

impl GeneratingCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total polyline length.
    pub fn arclength(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt())
            .sum()
    }
}

/// Embed a metric-grid snapshot.
///
/// The radicand `q = h - (m')^2/(4m) = h - ((sqrt m)')^2` is evaluated in
/// `sqrt(m)` form, which stays accurate against the 0/0 at the poles, where
/// the smoothness condition makes `q` vanish exactly (the curve meets the
/// axis with a vertical tangent). Values below `-tol_embed * h` fail; small
/// negatives clamp to zero.
pub fn embed_metric(grid: &MetricGrid, tol_embed: f64) -> Result<GeneratingCurve> {
    grid.validate()?;
    let n = grid.n_points();
    let a = grid.delta_rho();
    let p: Vec<f64> = grid.m.iter().map(|&v| v.sqrt()).collect();

    let mut q = vec![0.0; n];
    for i in 1..n - 1 {
        let p1 = (p[i + 1] - p[i - 1]) / (2.0 * a);
        let qi = grid.h[i] - p1 * p1;
        if qi < -tol_embed * grid.h[i] {
            return Err(FlowError::EmbeddingFailed(format!(
                "radicand {qi} at grid point {i}"
            )));
        }
        q[i] = qi.max(0.0);
    }

    let mut points = Vec::with_capacity(n);
    points.push([0.0, 0.0]);
    let mut x = 0.0;
    for i in 1..n {
        x += 0.5 * a * (q[i - 1].sqrt() + q[i].sqrt());
        points.push([x, p[i]]);
    }
    let x_e = points[(n - 1) / 2][0];
    for pt in &mut points {
        pt[0] -= x_e;
    }
    Ok(GeneratingCurve {
        t: grid.t,
        source: Method::Fd,
        points,
    })
}

/// Embed a lattice snapshot by chaining vertices from the leg lengths.
///
/// The rotation angle `alpha` between the two rails comes from the first
/// rung, `cos(alpha) = 1 - L_x[1]^2 / (2 L_y[0]^2)`; a rung at radius `y`
/// is then the chord `L_x = 2 y sin(alpha/2)` of the rotation about the
/// x-axis. Each rail segment advances `x` by the leftover of its length
/// after the radius change. `delta_theta` is the nominal opening angle of
/// the ladder; a recovered angle beyond `4 delta_theta` is rejected.
pub fn embed_lattice(
    lattice: &LadderLattice,
    delta_theta: f64,
    source: CurveSource,
    tol_embed: f64,
) -> Result<GeneratingCurve> {
    let n = lattice.n();
    if n < 2 || n % 2 != 0 {
        return Err(FlowError::InvalidState(format!(
            "embedding needs an even segment count >= 2, got {n}"
        )));
    }
    if lattice.l_x[0] != 0.0 || lattice.l_x[n] != 0.0 {
        return Err(FlowError::InvalidState("pole rungs must be zero".into()));
    }
    for (i, &v) in lattice.l_x[1..n].iter().enumerate() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(FlowError::NonpositiveRung {
                index: i + 1,
                value: v,
            });
        }
    }

    let cos_alpha = 1.0 - lattice.l_x[1].powi(2) / (2.0 * lattice.l_y[0].powi(2));
    if !(-1.0..1.0).contains(&cos_alpha) {
        return Err(FlowError::EmbeddingFailed(format!(
            "first rung incompatible with any rotation angle: cos(alpha) = {cos_alpha}"
        )));
    }
    let alpha = cos_alpha.acos();
    if alpha > 4.0 * delta_theta {
        return Err(FlowError::EmbeddingFailed(format!(
            "recovered rotation angle {alpha} far from the nominal opening angle {delta_theta}"
        )));
    }
    let chord = 2.0 * (0.5 * alpha).sin();

    let mut points = Vec::with_capacity(n + 1);
    points.push([0.0, 0.0]);
    for i in 1..=n {
        let y = if i == n { 0.0 } else { lattice.l_x[i] / chord };
        let prev = points[i - 1];
        let rail = lattice.l_y[i - 1];
        let dy = y - prev[1];
        let rad = rail * rail - dy * dy;
        if rad < -tol_embed * rail * rail {
            return Err(FlowError::EmbeddingFailed(format!(
                "rail segment {} shorter than its radius change: radicand {rad}",
                i - 1
            )));
        }
        points.push([prev[0] + rad.max(0.0).sqrt(), y]);
    }
    let x_e = points[n / 2][0];
    for pt in &mut points {
        pt[0] -= x_e;
    }
    Ok(GeneratingCurve {
        t: lattice.t,
        source,
        points,
    })
}

/// Resample a curve at `count` points uniform in normalized arclength.
fn resample(curve: &GeneratingCurve, count: usize) -> Vec<[f64; 2]> {
    let pts = &curve.points;
    let mut cum = Vec::with_capacity(pts.len());
    cum.push(0.0);
    for w in pts.windows(2) {
        let seg = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
        cum.push(cum.last().unwrap() + seg);
    }
    let total = *cum.last().unwrap();
    if total == 0.0 {
        return vec![pts[0]; count];
    }
    (0..count)
        .map(|k| {
            let target = total * k as f64 / (count - 1) as f64;
            let j = cum
                .partition_point(|&v| v < target)
                .clamp(1, pts.len() - 1);
            let seg = cum[j] - cum[j - 1];
            let frac = if seg > 0.0 { (target - cum[j - 1]) / seg } else { 0.0 };
            [
                pts[j - 1][0] + frac * (pts[j][0] - pts[j - 1][0]),
                pts[j - 1][1] + frac * (pts[j][1] - pts[j - 1][1]),
            ]
        })
        .collect()
}

/// Diagnostic: residual of the in-plane rotation reading of the rung
/// relation, `L_x[i] - 2 sin(alpha/2) sqrt((x_i - x_0)^2 + y_i^2)`, with x
/// measured from the north pole as in the vertex-chaining construction.
///
/// Rotating a vertex within its meridian plane by `alpha` produces a chord
/// proportional to its full distance from the pole rather than its
/// distance from the axis, so this reading agrees with the rung lengths
/// only where `x = x_0`; the revolution chord used by [`embed_lattice`] is
/// the consistent one. Returns the largest interior residual.
pub fn in_plane_rotation_residual(lattice: &LadderLattice, curve: &GeneratingCurve) -> f64 {
    let n = lattice.n();
    assert_eq!(curve.len(), n + 1, "curve must match the lattice");
    let cos_alpha = 1.0 - lattice.l_x[1].powi(2) / (2.0 * lattice.l_y[0].powi(2));
    let chord = 2.0 * (0.5 * cos_alpha.clamp(-1.0, 1.0).acos()).sin();
    let x0 = curve.points[0][0];
    (1..n)
        .map(|i| {
            let dx = curve.points[i][0] - x0;
            let y = curve.points[i][1];
            (lattice.l_x[i] - chord * (dx * dx + y * y).sqrt()).abs()
        })
        .fold(0.0, f64::max)
}

/// Maximum pointwise distance between two curves after resampling both at
/// 512 points uniform in normalized arclength.
pub fn curve_distance(a: &GeneratingCurve, b: &GeneratingCurve) -> f64 {
    const SAMPLES: usize = 512;
    let ra = resample(a, SAMPLES);
    let rb = resample(b, SAMPLES);
    ra.iter()
        .zip(&rb)
        .map(|(p, q)| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

/// Reference semicircle of radius `r` centered on the origin, as a dense
/// polyline matching the curve conventions (used by tests and the
/// comparison tooling).
pub fn semicircle(r: f64, points: usize) -> GeneratingCurve {
    let pts = (0..points)
        .map(|k| {
            let theta = std::f64::consts::PI * k as f64 / (points - 1) as f64;
            [-r * theta.cos(), r * theta.sin()]
        })
        .collect();
    GeneratingCurve {
        t: 0.0,
        source: Method::Fd,
        points: pts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::init_metric;
    use crate::lattice::sphere_lattice;
    use std::f64::consts::PI;

    const DTH: f64 = 2.0 * PI / 256.0;

    #[test]
    fn metric_sphere_embeds_to_semicircle() {
        let g = init_metric(0.0, 0.0, 801).unwrap();
        let c = embed_metric(&g, DEFAULT_TOL_EMBED).unwrap();
        for (i, pt) in c.points.iter().enumerate() {
            let rho = g.rho(i);
            assert!((pt[0] - (-rho.cos())).abs() < 2e-5, "x[{i}]");
            assert!((pt[1] - rho.sin()).abs() < 1e-12, "y[{i}]");
        }
        assert_eq!(c.points[400][0], 0.0);
    }

    #[test]
    fn metric_embedding_scales_with_shrunken_sphere() {
        let mut g = init_metric(0.0, 0.0, 401).unwrap();
        let scale: f64 = 0.64; // 1 - 2t
        for v in g.h.iter_mut() {
            *v *= scale;
        }
        for v in g.m.iter_mut() {
            *v *= scale;
        }
        let c = embed_metric(&g, DEFAULT_TOL_EMBED).unwrap();
        let r = scale.sqrt();
        for (i, pt) in c.points.iter().enumerate() {
            let d = (pt[0] * pt[0] + pt[1] * pt[1]).sqrt();
            assert!((d - r).abs() < 1e-4, "radius at {i}: {d} vs {r}");
        }
    }

    #[test]
    fn metric_pole_tangent_is_vertical() {
        // q -> 0 at the poles, so the first x increments are O(drho^2)
        // while y grows linearly: the curve leaves the axis vertically.
        let g = init_metric(0.766, -0.091, 801).unwrap();
        let c = embed_metric(&g, DEFAULT_TOL_EMBED).unwrap();
        let dx = c.points[1][0] - c.points[0][0];
        let dy = c.points[1][1] - c.points[0][1];
        assert!(dx < 0.2 * dy, "dx = {dx}, dy = {dy}");
    }

    #[test]
    fn lattice_sphere_recovers_angle_and_circle() {
        let lat = sphere_lattice(100, DTH, 1.0);
        let c = embed_lattice(&lat, DTH, Method::SlrfV1, DEFAULT_TOL_EMBED).unwrap();
        let cos_alpha = 1.0 - lat.l_x[1].powi(2) / (2.0 * lat.l_y[0].powi(2));
        let alpha = cos_alpha.acos();
        assert!((alpha - DTH).abs() < 1e-5, "alpha = {alpha} vs {DTH}");
        for (i, pt) in c.points.iter().enumerate() {
            let r = (pt[0] * pt[0] + pt[1] * pt[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-3, "radius at {i}: {r}");
        }
        assert_eq!(c.points[50][0], 0.0);
        assert_eq!(c.points[0][1], 0.0);
        assert_eq!(c.points[100][1], 0.0);
    }

    #[test]
    fn degenerate_two_segment_lattice_inverts_exactly() {
        let alpha: f64 = 0.1;
        let d = 0.37;
        let l_x1 = 2.0 * d * (alpha / 2.0).sin();
        let lat = LadderLattice {
            t: 0.0,
            l_x: vec![0.0, l_x1, 0.0],
            l_y: vec![d, d],
            ricci: vec![0.0; 3],
        };
        let recovered = 1.0 - l_x1 * l_x1 / (2.0 * d * d);
        assert!((recovered - alpha.cos()).abs() < 1e-12);
        let c = embed_lattice(&lat, alpha, Method::SlrfV1, DEFAULT_TOL_EMBED).unwrap();
        assert_eq!(c.len(), 3);
        assert!((c.points[1][1] - d).abs() < 1e-12);
    }

    #[test]
    fn lattice_embedding_is_homogeneous() {
        let lat = sphere_lattice(100, DTH, 1.0);
        let mut scaled = lat.clone();
        let lambda = 3.5;
        for v in scaled.l_x.iter_mut().chain(scaled.l_y.iter_mut()) {
            *v *= lambda;
        }
        let a = embed_lattice(&lat, DTH, Method::SlrfV1, DEFAULT_TOL_EMBED).unwrap();
        let b = embed_lattice(&scaled, DTH, Method::SlrfV1, DEFAULT_TOL_EMBED).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert!((lambda * p[0] - q[0]).abs() < 1e-13 * lambda);
            assert!((lambda * p[1] - q[1]).abs() < 1e-13 * lambda);
        }
    }

    #[test]
    fn lattice_construction_identities() {
        let lat = sphere_lattice(128, DTH, 1.0);
        let c = embed_lattice(&lat, DTH, Method::SlrfV2, DEFAULT_TOL_EMBED).unwrap();
        let cos_alpha = 1.0 - lat.l_x[1].powi(2) / (2.0 * lat.l_y[0].powi(2));
        let chord = 2.0 * (0.5 * cos_alpha.acos()).sin();
        // Radius fidelity: 2 y_i sin(alpha/2) reproduces every rung.
        for i in 1..128 {
            let back = c.points[i][1] * chord;
            assert!((back - lat.l_x[i]).abs() <= 1e-14 * lat.l_x[i]);
        }
        // Arclength fidelity: the polyline length is the total rail length.
        let rail: f64 = lat.total_rail_length();
        assert!((c.arclength() - rail).abs() <= 1e-12 * rail);
    }

    #[test]
    fn symmetric_lattice_embeds_symmetrically() {
        let cfg = crate::config::FlowConfig {
            c3: 0.021,
            c5: 0.598,
            ..Default::default()
        };
        let lat = crate::lattice::init_lattice(&cfg).unwrap();
        let c = embed_lattice(&lat, cfg.delta_theta, Method::SlrfV1, DEFAULT_TOL_EMBED).unwrap();
        let n = lat.n();
        for i in 0..=n {
            assert!((c.points[i][0] + c.points[n - i][0]).abs() < 1e-10, "x at {i}");
            assert!((c.points[i][1] - c.points[n - i][1]).abs() < 1e-10, "y at {i}");
        }
    }

    #[test]
    fn in_plane_rotation_reading_is_inconsistent_away_from_pole() {
        // The revolution chord reproduces every rung by construction; the
        // in-plane rotation reading drifts with distance from the pole.
        let lat = sphere_lattice(100, DTH, 1.0);
        let c = embed_lattice(&lat, DTH, Method::SlrfV1, DEFAULT_TOL_EMBED).unwrap();
        let res = in_plane_rotation_residual(&lat, &c);
        assert!(res > lat.l_x[50], "in-plane residual {res:e}");
        // Near the pole (x = x_0) the two readings coincide.
        let x0 = c.points[0][0];
        let dx = c.points[1][0] - x0;
        let y = c.points[1][1];
        let cos_alpha = 1.0 - lat.l_x[1].powi(2) / (2.0 * lat.l_y[0].powi(2));
        let chord = 2.0 * (0.5 * cos_alpha.acos()).sin();
        let first = (lat.l_x[1] - chord * (dx * dx + y * y).sqrt()).abs();
        assert!(first < 1e-12 * lat.l_x[1], "first-rung residual {first:e}");
    }

    #[test]
    fn curve_distance_basics() {
        let a = semicircle(1.0, 1025);
        assert_eq!(curve_distance(&a, &a), 0.0);
        let b = semicircle(1.001, 1025);
        let d = curve_distance(&a, &b);
        assert!((d - 1e-3).abs() < 1e-5, "distance = {d}");
    }

    #[test]
    fn impossible_rail_rejected() {
        // Second rung jumps more than the rail segment can span.
        let lat = LadderLattice {
            t: 0.0,
            l_x: vec![0.0, 0.01, 0.2, 0.01, 0.0],
            l_y: vec![0.05; 4],
            ricci: vec![0.0; 5],
        };
        let r = embed_lattice(&lat, 0.1, Method::SlrfV1, DEFAULT_TOL_EMBED);
        assert!(matches!(r, Err(FlowError::EmbeddingFailed(_))));
    }
}
