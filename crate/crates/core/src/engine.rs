//! Smooth-lattice Ricci flow: curvature extraction, leg evolution, RK4
//! stepping with pole interpolation, regridding and the run loop.
//!
//! Two methods are provided. Method 1 derives the Ricci scalar from the
//! rung lengths through the geodesic deviation relation
//! `R = -(2 / L_x) d^2 L_x / ds^2`; method 2 carries `R` as evolved state
//! with `dR/dt = R^2 + (1/L_x)(dL_x/ds)(dR/ds) + d^2 R/ds^2`. Both evolve
//! the legs by `dL/dt = -Int R_mn v^m v^n ds` estimated with the
//! trapezoidal rule, which in 2D reduces to endpoint averages of `R / 2`.

use crate::config::{FlowConfig, Method, TimestepMode};
use crate::error::{FlowError, Result};
use crate::lattice::{extend_over_poles, init_lattice, LadderLattice};
use crate::stencil::{d2_ds2, d_ds, even_interpolate, lagrange3};

/// Per-step record emitted by the run loop.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    pub step_index: usize,
    pub t: f64,
    pub dt: f64,
    pub max_ricci: f64,
    pub min_rail: f64,
    pub min_interior_rung: f64,
    pub regrid_performed: bool,
}

/// Why a run loop ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// dt dropped below dt_initial / stop_factor.
    StopCriterion,
    /// Configured step cap reached.
    MaxSteps,
    /// The state became invalid; the run keeps everything up to the last
    /// good step.
    Failed(FlowError),
}

impl Termination {
    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::Failed(_))
    }
}

/// Output of [`run_flow`]: every snapshot (initial and final included) plus
/// per-step diagnostics.
#[derive(Debug, Clone)]
pub struct FlowRun {
    pub snapshots: Vec<LadderLattice>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub termination: Termination,
}

/// Replace the near-pole entries of a per-vertex field (indices `< n_g`
/// from either pole) by even interpolation in s^2 of the entries at
/// `n_g ..= m_g`.
pub(crate) fn pole_fill(values: &mut [f64], l_y: &[f64], n_g: usize, m_g: usize) -> Result<()> {
    let n = l_y.len();
    debug_assert_eq!(values.len(), n + 1);

    let mut s = 0.0;
    let mut north: Vec<(f64, f64)> = Vec::with_capacity(m_g - n_g + 1);
    let mut north_targets: Vec<f64> = Vec::with_capacity(n_g);
    for i in 0..=m_g {
        if i < n_g {
            north_targets.push(s);
        } else {
            north.push((s, values[i]));
        }
        if i < n {
            s += l_y[i];
        }
    }
    let filled = even_interpolate(&north, &north_targets)?;
    values[..n_g].copy_from_slice(&filled);

    let mut s = 0.0;
    let mut south: Vec<(f64, f64)> = Vec::with_capacity(m_g - n_g + 1);
    let mut south_targets: Vec<f64> = Vec::with_capacity(n_g);
    for i in 0..=m_g {
        if i < n_g {
            south_targets.push(s);
        } else {
            south.push((s, values[n - i]));
        }
        if i < n {
            s += l_y[n - 1 - i];
        }
    }
    let filled = even_interpolate(&south, &south_targets)?;
    for (i, v) in filled.into_iter().enumerate() {
        values[n - i] = v;
    }
    Ok(())
}

/// Method-1 curvature: `R_i = -(2 / L_x[i]) d^2 L_x / ds^2` on the
/// ghost-extended lattice for `n_g <= i <= N - n_g`, with the remaining
/// near-pole values filled by even interpolation.
pub fn curvature_from_legs(lattice: &LadderLattice, config: &FlowConfig) -> Result<Vec<f64>> {
    let n = lattice.n();
    let n_g = config.interp_start;
    let m_g = config.ghost_depth;
    let ghost = extend_over_poles(lattice, m_g)?;
    let (l_x, s) = ghost.l_x_raw();
    let off = ghost.margin();

    let mut ricci = vec![0.0; n + 1];
    for i in n_g..=n - n_g {
        let rung = lattice.l_x[i];
        if !(rung > 0.0 && rung.is_finite()) {
            return Err(FlowError::NonpositiveRung {
                index: i,
                value: rung,
            });
        }
        ricci[i] = -2.0 * d2_ds2(l_x, s, i + off)? / rung;
    }
    pole_fill(&mut ricci, &lattice.l_y, n_g, m_g)?;
    Ok(ricci)
}

/// Laplacian of an axisymmetric scalar on the lattice:
/// `(1/L_x)(dL_x/ds)(df/ds) + d^2 f/ds^2` at interior vertices, with the
/// near-pole values filled by even interpolation of the interior result.
pub fn lattice_laplacian(f: &[f64], lattice: &LadderLattice, config: &FlowConfig) -> Result<Vec<f64>> {
    let n = lattice.n();
    if f.len() != n + 1 {
        return Err(FlowError::InvalidState(format!(
            "field length {} does not match {} vertices",
            f.len(),
            n + 1
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::NonFinite("laplacian input".into()));
    }
    let n_g = config.interp_start;
    let m_g = config.ghost_depth;
    let ghost = extend_over_poles(lattice, m_g)?;
    let (l_x, s) = ghost.l_x_raw();
    let fe = ghost.extend_even(f);
    let off = ghost.margin();

    let mut lap = vec![0.0; n + 1];
    for i in n_g..=n - n_g {
        let rung = lattice.l_x[i];
        if !(rung > 0.0 && rung.is_finite()) {
            return Err(FlowError::NonpositiveRung {
                index: i,
                value: rung,
            });
        }
        lap[i] = d_ds(l_x, s, i + off)? / rung * d_ds(&fe, s, i + off)? + d2_ds2(&fe, s, i + off)?;
    }
    pole_fill(&mut lap, &lattice.l_y, n_g, m_g)?;
    Ok(lap)
}

/// Leg evolution rates from the trapezoidal estimate of the flow integral.
///
/// In 2D the integrand `R_mn v^m v^n` is `R / 2` for any unit tangent, so a
/// rail segment gets the average of its endpoint curvatures while a rung's
/// two endpoints share the same `R` by axisymmetry:
///
/// ```text
/// dL_y[i]/dt = -(R[i] + R[i+1]) L_y[i] / 4
/// dL_x[i]/dt = -R[i] L_x[i] / 2
/// ```
pub fn leg_rates(lattice: &LadderLattice, ricci: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = lattice.n();
    if ricci.len() != n + 1 {
        return Err(FlowError::InvalidState(format!(
            "ricci length {} does not match {} vertices",
            ricci.len(),
            n + 1
        )));
    }
    if ricci.iter().any(|v| !v.is_finite()) {
        return Err(FlowError::NonFinite("ricci".into()));
    }
    let d_l_x: Vec<f64> = (0..=n).map(|i| -0.5 * ricci[i] * lattice.l_x[i]).collect();
    let d_l_y: Vec<f64> = (0..n)
        .map(|i| -0.25 * (ricci[i] + ricci[i + 1]) * lattice.l_y[i])
        .collect();
    Ok((d_l_x, d_l_y))
}

/// Time step for the next flow step.
pub fn select_timestep(lattice: &LadderLattice, config: &FlowConfig) -> Result<f64> {
    let dt = match config.timestep_mode {
        TimestepMode::PaperLiteral => config.courant_factor * lattice.max_rail(),
        TimestepMode::CourantSquared => {
            let m = lattice.min_rail();
            config.courant_factor * m * m
        }
    };
    if dt > 0.0 && dt.is_finite() {
        Ok(dt)
    } else {
        Err(FlowError::InvalidTimestep(dt))
    }
}

/// Classical RK4 over a set of field vectors. `deriv` evaluates the time
/// derivative of every field; `post` is applied to each of the four stage
/// states as it is formed and to the combined end-of-step state, before any
/// derivative evaluation sees it.
pub fn rk4_fields<D, P>(
    fields: &[Vec<f64>],
    dt: f64,
    mut deriv: D,
    mut post: P,
) -> Result<Vec<Vec<f64>>>
where
    D: FnMut(&[Vec<f64>]) -> Result<Vec<Vec<f64>>>,
    P: FnMut(&mut [Vec<f64>]) -> Result<()>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::InvalidTimestep(dt));
    }
    let shifted = |base: &[Vec<f64>], k: &[Vec<f64>], c: f64| -> Vec<Vec<f64>> {
        base.iter()
            .zip(k)
            .map(|(b, kb)| b.iter().zip(kb).map(|(&y, &d)| y + c * d).collect())
            .collect()
    };

    let mut base = fields.to_vec();
    post(&mut base)?;
    let k1 = deriv(&base)?;
    let mut stage = shifted(&base, &k1, 0.5 * dt);
    post(&mut stage)?;
    let k2 = deriv(&stage)?;
    let mut stage = shifted(&base, &k2, 0.5 * dt);
    post(&mut stage)?;
    let k3 = deriv(&stage)?;
    let mut stage = shifted(&base, &k3, dt);
    post(&mut stage)?;
    let k4 = deriv(&stage)?;

    let mut out = base;
    for (field, (((a, b), c), d)) in out
        .iter_mut()
        .zip(k1.iter().zip(&k2).zip(&k3).zip(&k4))
    {
        for (j, v) in field.iter_mut().enumerate() {
            *v += dt / 6.0 * (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]);
        }
    }
    post(&mut out)?;
    Ok(out)
}

fn check_stage_legs(l_x: &[f64], l_y: &[f64]) -> Result<()> {
    let n = l_y.len();
    for (i, &v) in l_y.iter().enumerate() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(FlowError::RailCollapse { index: i, value: v });
        }
    }
    for (i, &v) in l_x[1..n].iter().enumerate() {
        if !(v > 0.0 && v.is_finite()) {
            return Err(FlowError::NonpositiveRung {
                index: i + 1,
                value: v,
            });
        }
    }
    Ok(())
}

/// One method-1 step: RK4 on `(L_x, L_y)` with the curvature recomputed
/// from the stage rung lengths at every derivative evaluation. Pole rungs
/// are held at exactly zero.
pub fn rk4_step_v1(lattice: &LadderLattice, dt: f64, config: &FlowConfig) -> Result<LadderLattice> {
    let n = lattice.n();
    let fields = [lattice.l_x.clone(), lattice.l_y.clone()];
    let out = rk4_fields(
        &fields,
        dt,
        |f| {
            let stage = LadderLattice {
                t: lattice.t,
                l_x: f[0].clone(),
                l_y: f[1].clone(),
                ricci: vec![0.0; n + 1],
            };
            let ricci = curvature_from_legs(&stage, config)?;
            let (d_l_x, d_l_y) = leg_rates(&stage, &ricci)?;
            Ok(vec![d_l_x, d_l_y])
        },
        |f| {
            f[0][0] = 0.0;
            f[0][n] = 0.0;
            check_stage_legs(&f[0], &f[1])
        },
    )?;
    let [l_x, l_y] = <[Vec<f64>; 2]>::try_from(out).expect("field count");
    let ricci = curvature_from_legs(
        &LadderLattice {
            t: lattice.t,
            l_x: l_x.clone(),
            l_y: l_y.clone(),
            ricci: vec![0.0; n + 1],
        },
        config,
    )?;
    Ok(LadderLattice {
        t: lattice.t + dt,
        l_x,
        l_y,
        ricci,
    })
}

/// One method-2 step: RK4 on the joint state `(L_x, L_y, R)`. The near-pole
/// entries of `R` are replaced by even interpolation on every stage state
/// before its derivative evaluation and on the end-of-step state.
pub fn rk4_step_v2(lattice: &LadderLattice, dt: f64, config: &FlowConfig) -> Result<LadderLattice> {
    let n = lattice.n();
    let n_g = config.interp_start;
    let m_g = config.ghost_depth;
    let fields = [
        lattice.l_x.clone(),
        lattice.l_y.clone(),
        lattice.ricci.clone(),
    ];
    let out = rk4_fields(
        &fields,
        dt,
        |f| {
            let stage = LadderLattice {
                t: lattice.t,
                l_x: f[0].clone(),
                l_y: f[1].clone(),
                ricci: f[2].clone(),
            };
            let lap = lattice_laplacian(&stage.ricci, &stage, config)?;
            let d_ricci: Vec<f64> = stage
                .ricci
                .iter()
                .zip(&lap)
                .map(|(&r, &l)| r * r + l)
                .collect();
            let (d_l_x, d_l_y) = leg_rates(&stage, &stage.ricci)?;
            Ok(vec![d_l_x, d_l_y, d_ricci])
        },
        |f| {
            f[0][0] = 0.0;
            f[0][n] = 0.0;
            check_stage_legs(&f[0], &f[1])?;
            let (ricci, rest) = f.split_last_mut().expect("three fields");
            pole_fill(ricci, &rest[1], n_g, m_g)
        },
    )?;
    let [l_x, l_y, ricci] = <[Vec<f64>; 3]>::try_from(out).expect("field count");
    Ok(LadderLattice {
        t: lattice.t + dt,
        l_x,
        l_y,
        ricci,
    })
}

/// Remap the lattice onto uniformly spaced rail segments of the same total
/// length. Rungs and curvatures move to the new abscissae by piecewise
/// quadratic interpolation on the ghost-extended data; the stencil is the
/// three old points whose center lies nearest the target, ties broken away
/// from the nearest pole. Pole rungs stay zero and pole curvatures come
/// from even interpolation of the new near-pole values. Flow time is
/// unchanged.
pub fn regrid(lattice: &LadderLattice, config: &FlowConfig) -> Result<LadderLattice> {
    lattice.validate()?;
    let n = lattice.n();
    let s_old = lattice.arclength();
    let total = s_old[n];

    let ghost = extend_over_poles(lattice, 2)?;
    let (l_x_e, s_e) = ghost.l_x_raw();
    let (ricci_e, _) = ghost.ricci_raw();
    let off = ghost.margin();

    let seg = total / n as f64;
    let mut l_x = vec![0.0; n + 1];
    let mut ricci = vec![0.0; n + 1];
    for i in 1..n {
        let target = i as f64 * seg;
        // Bracketing old interval [s_old[j], s_old[j+1]].
        let j = s_old.partition_point(|&v| v < target).saturating_sub(1).min(n - 1);
        let d_lo = target - s_old[j];
        let d_hi = s_old[j + 1] - target;
        // Nearest stencil center; exact ties break away from the nearest
        // pole so the rule is symmetric under reflection.
        let center = if d_lo < d_hi {
            j
        } else if d_lo > d_hi || target < 0.5 * total {
            j + 1
        } else {
            j
        };
        let c = center + off;
        let xs = [s_e[c - 1], s_e[c], s_e[c + 1]];
        l_x[i] = lagrange3(xs, [l_x_e[c - 1], l_x_e[c], l_x_e[c + 1]], target);
        ricci[i] = lagrange3(xs, [ricci_e[c - 1], ricci_e[c], ricci_e[c + 1]], target);
    }

    let l_y = vec![seg; n];
    let n_g = config.interp_start;
    let m_g = config.ghost_depth;
    let north: Vec<(f64, f64)> = (n_g..=m_g).map(|i| (i as f64 * seg, ricci[i])).collect();
    ricci[0] = even_interpolate(&north, &[0.0])?[0];
    let south: Vec<(f64, f64)> = (n_g..=m_g).map(|i| (i as f64 * seg, ricci[n - i])).collect();
    ricci[n] = even_interpolate(&south, &[0.0])?[0];

    let out = LadderLattice {
        t: lattice.t,
        l_x,
        l_y,
        ricci,
    };
    out.validate()?;
    Ok(out)
}

/// Drive a lattice method from the initial data to the stop criterion.
///
/// The loop selects a time step, advances by RK4, regrids on the configured
/// cadence and records diagnostics. It ends when dt falls below
/// `dt_initial / stop_factor`, when `max_steps` is reached, or when the
/// state turns invalid; collapse is reported through
/// [`FlowRun::termination`], never as a panic.
pub fn run_flow(config: &FlowConfig) -> Result<FlowRun> {
    config.validate()?;
    let step_fn = match config.method {
        Method::SlrfV1 => rk4_step_v1,
        Method::SlrfV2 => rk4_step_v2,
        Method::Fd => {
            return Err(FlowError::InvalidConfig(
                "run_flow drives the lattice methods; use fd::run_fd for the reference solver"
                    .into(),
            ))
        }
    };

    let mut lattice = init_lattice(config)?;
    let mut snapshots = vec![lattice.clone()];
    let mut diagnostics: Vec<StepDiagnostics> = Vec::new();

    let mut targets = config.snapshot_times.clone();
    targets.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    let mut next_target = targets.partition_point(|&t| t <= 0.0);

    let mut dt_initial = None;
    let mut step = 0usize;
    let mut last_snapshot_step = 0usize;

    let termination = loop {
        if config.max_steps.is_some_and(|cap| step >= cap) {
            break Termination::MaxSteps;
        }
        let dt = match select_timestep(&lattice, config) {
            Ok(dt) => dt,
            Err(e) => break Termination::Failed(e),
        };
        let dt0 = *dt_initial.get_or_insert(dt);
        if dt < dt0 / config.stop_factor {
            break Termination::StopCriterion;
        }
        lattice = match step_fn(&lattice, dt, config) {
            Ok(next) => next,
            Err(e) => break Termination::Failed(e),
        };
        step += 1;

        let mut regridded = false;
        if config.regrid_every > 0 && step % config.regrid_every == 0 {
            match regrid(&lattice, config) {
                Ok(next) => {
                    lattice = next;
                    regridded = true;
                }
                Err(e) => break Termination::Failed(e),
            }
        }

        diagnostics.push(StepDiagnostics {
            step_index: step,
            t: lattice.t,
            dt,
            max_ricci: lattice.ricci.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min_rail: lattice.min_rail(),
            min_interior_rung: lattice.min_interior_rung(),
            regrid_performed: regridded,
        });

        let mut want = config.snapshot_every > 0 && step % config.snapshot_every == 0;
        while next_target < targets.len() && lattice.t >= targets[next_target] {
            want = true;
            next_target += 1;
        }
        if want {
            snapshots.push(lattice.clone());
            last_snapshot_step = step;
        }
    };

    if last_snapshot_step != step {
        snapshots.push(lattice.clone());
    }
    Ok(FlowRun {
        snapshots,
        diagnostics,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::sphere_lattice;
    use std::f64::consts::PI;

    fn cfg(n: usize) -> FlowConfig {
        FlowConfig {
            n,
            ..FlowConfig::default()
        }
    }

    #[test]
    fn sphere_curvature_accuracy_and_order() {
        let err_at = |n: usize| {
            let lat = sphere_lattice(n, 2.0 * PI / 256.0, 1.0);
            let r = curvature_from_legs(&lat, &cfg(n)).unwrap();
            r.iter().map(|&v| (v - 2.0).abs()).fold(0.0, f64::max)
        };
        let e100 = err_at(100);
        let e200 = err_at(200);
        assert!(e100 <= 1e-2, "max |R - 2| = {e100}");
        let ratio = e100 / e200;
        assert!((3.2..=4.8).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn linear_rung_profile_is_flat() {
        // L_x proportional to s: a cone away from the apex has R = 0.
        let n = 64;
        let ds = 0.02;
        let mut l_x: Vec<f64> = (0..=n).map(|i| 0.03 * i as f64 * ds).collect();
        l_x[n] = 0.0; // pole pin; the south cap is not probed below
        let lat = LadderLattice {
            t: 0.0,
            l_x,
            l_y: vec![ds; n],
            ricci: vec![0.0; n + 1],
        };
        let c = cfg(n);
        let r = curvature_from_legs(&lat, &c).unwrap();
        for i in c.interp_start..=n - c.interp_start - 2 {
            assert!(r[i].abs() < 1e-10, "R[{i}] = {}", r[i]);
        }
    }

    #[test]
    fn curvature_scale_invariance() {
        let lat = sphere_lattice(100, 2.0 * PI / 256.0, 1.0);
        let c = cfg(100);
        let base = curvature_from_legs(&lat, &c).unwrap();
        let mut scaled = lat.clone();
        for v in &mut scaled.l_x {
            *v *= 10.0;
        }
        let r10 = curvature_from_legs(&scaled, &c).unwrap();
        // The operator is homogeneous of degree zero in the rungs; the
        // only difference is rounding amplified by the second difference.
        for (a, b) in base.iter().zip(&r10) {
            assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let lat = sphere_lattice(100, 2.0 * PI / 256.0, 1.0);
        let f = vec![3.0; 101];
        let lap = lattice_laplacian(&f, &lat, &cfg(100)).unwrap();
        for v in lap {
            assert!(v.abs() < 1e-10, "laplacian = {v}");
        }
    }

    #[test]
    fn laplacian_of_cos_on_sphere() {
        // On the unit sphere, Lap(cos s) = -2 cos s.
        let n = 100;
        let lat = sphere_lattice(n, 2.0 * PI / 256.0, 1.0);
        let s = lat.arclength();
        let f: Vec<f64> = s.iter().map(|&x| x.cos()).collect();
        let lap = lattice_laplacian(&f, &lat, &cfg(n)).unwrap();
        let mut max_err: f64 = 0.0;
        for i in 0..=n {
            max_err = max_err.max((lap[i] + 2.0 * s[i].cos()).abs());
        }
        assert!(max_err < 2e-3, "max error = {max_err}");
    }

    #[test]
    fn constant_curvature_has_zero_laplacian_rhs() {
        let lat = sphere_lattice(100, 2.0 * PI / 256.0, 1.0);
        let lap = lattice_laplacian(&lat.ricci, &lat, &cfg(100)).unwrap();
        for (i, &v) in lap.iter().enumerate() {
            let rhs = lat.ricci[i] * lat.ricci[i] + v;
            assert!((rhs - 4.0).abs() < 1e-9, "rhs[{i}] = {rhs}");
        }
    }

    #[test]
    fn leg_rates_match_sphere_law_and_arithmetic() {
        let lat = sphere_lattice(100, 2.0 * PI / 256.0, 1.0);
        let (d_l_x, d_l_y) = leg_rates(&lat, &lat.ricci).unwrap();
        for i in 0..100 {
            assert!((d_l_y[i] + lat.l_y[i]).abs() < 1e-15);
            assert!((d_l_x[i] + lat.l_x[i]).abs() < 1e-15);
        }

        let zeros = vec![0.0; 101];
        let (d_l_x, d_l_y) = leg_rates(&lat, &zeros).unwrap();
        assert!(d_l_x.iter().chain(&d_l_y).all(|&v| v == 0.0));

        let mut small = sphere_lattice(8, 0.1, 1.0);
        small.l_y[0] = 0.1;
        let mut r = vec![0.0; 9];
        r[0] = 2.0;
        r[1] = 4.0;
        let (_, d_l_y) = leg_rates(&small, &r).unwrap();
        assert!((d_l_y[0] + 0.15).abs() < 1e-15);
    }

    #[test]
    fn timestep_modes() {
        let lat = sphere_lattice(100, 2.0 * PI / 256.0, 1.0);
        let literal = FlowConfig {
            timestep_mode: TimestepMode::PaperLiteral,
            ..cfg(100)
        };
        let dt = select_timestep(&lat, &literal).unwrap();
        assert!((dt - 0.1 * PI / 100.0).abs() < 1e-15);

        let squared = cfg(100);
        let dt = select_timestep(&lat, &squared).unwrap();
        assert!((dt - 0.1 * (PI / 100.0) * (PI / 100.0)).abs() < 1e-15);

        // Halving the minimum rail quarters the squared-mode step.
        let mut shrunk = lat.clone();
        for v in &mut shrunk.l_y {
            *v *= 0.5;
        }
        let dt_half = select_timestep(&shrunk, &squared).unwrap();
        assert!((dt_half - 0.25 * dt).abs() < 1e-18);
    }

    #[test]
    fn rk4_integrator_matches_exact_sphere_law() {
        // Drive the RK4 machinery with the exact curvature of a shrinking
        // sphere, R = 2 / r^2 with r proportional to any leg. The leg law
        // L = L0 sqrt(1 - 2t) is then resolved to integrator accuracy.
        let l0 = PI / 100.0;
        let dt = 1e-4;
        let fields = [vec![l0; 100]];
        let out = rk4_fields(
            &fields,
            dt,
            |f| {
                let scale = f[0][0] / l0;
                let ricci = 2.0 / (scale * scale);
                Ok(vec![f[0].iter().map(|&l| -0.5 * ricci * l).collect()])
            },
            |_| Ok(()),
        )
        .unwrap();
        let expect = l0 * (1.0 - 2.0 * dt).sqrt();
        for &l in &out[0] {
            assert!(
                (l / l0 - expect / l0).abs() < 1e-12,
                "L/L0 = {}, expected {}",
                l / l0,
                expect / l0
            );
        }
    }

    #[test]
    fn v1_step_tracks_shrinking_sphere() {
        // With the curvature recomputed from the legs, the one-step leg
        // ratio carries the O(N^-2) curvature bias of the stencil, here
        // about 1.6e-9 at N = 100 and dt = 1e-4.
        let lat = sphere_lattice(100, 2.0 * PI / 256.0, 1.0);
        let dt = 1e-4;
        let out = rk4_step_v1(&lat, dt, &cfg(100)).unwrap();
        let expect = (1.0 - 2.0 * dt).sqrt();
        for i in 0..100 {
            let ratio = out.l_y[i] / lat.l_y[i];
            assert!((ratio - expect).abs() < 2e-8, "ratio = {ratio}");
        }
        assert_eq!(out.l_x[0], 0.0);
        assert_eq!(out.l_x[100], 0.0);
        assert_eq!(out.t, dt);
    }

    #[test]
    fn flat_state_is_frozen_under_v1() {
        // R = 0 synthetic data: a linear rung profile on both halves.
        let n = 64;
        let ds = 0.02;
        let mut l_x = vec![0.0; n + 1];
        for i in 1..n {
            let s = i as f64 * ds;
            let s_south = (n - i) as f64 * ds;
            l_x[i] = 0.05 * s.min(s_south);
        }
        let lat = LadderLattice {
            t: 0.0,
            l_x,
            l_y: vec![ds; n],
            ricci: vec![0.0; n + 1],
        };
        // The kink at the equator is outside the flat-cone regime, so probe
        // only a single tiny step and the northern half.
        let out = rk4_step_v1(&lat, 1e-9, &cfg(n)).unwrap();
        for i in 0..n / 2 - 2 {
            assert!(
                (out.l_x[i] - lat.l_x[i]).abs() < 1e-12 * lat.l_x[i].max(1e-3),
                "rung {i} moved"
            );
        }
    }

    #[test]
    fn v1_preserves_equatorial_symmetry() {
        let config = cfg(100);
        let lat = init_lattice(&config).unwrap();
        let dt = select_timestep(&lat, &config).unwrap();
        let out = rk4_step_v1(&lat, dt, &config).unwrap();
        let n = out.n();
        for i in 0..=n {
            let a = out.l_x[i];
            let b = out.l_x[n - i];
            assert!((a - b).abs() <= 1e-13 * a.abs().max(1e-30), "asym at {i}");
        }
    }

    #[test]
    fn v2_step_tracks_ricci_growth() {
        // On the round sphere the Laplacian term vanishes and
        // dR/dt = R^2, so R(dt) = 2 / (1 - 2 dt) to integrator order.
        let lat = sphere_lattice(100, 2.0 * PI / 256.0, 1.0);
        let dt = 1e-3;
        let out = rk4_step_v2(&lat, dt, &cfg(100)).unwrap();
        let expect = 2.0 / (1.0 - 2.0 * dt);
        for (i, &r) in out.ricci.iter().enumerate() {
            assert!((r - expect).abs() < 1e-10, "R[{i}] = {r}, expected {expect}");
        }
    }

    #[test]
    fn zero_curvature_freezes_v2() {
        let n = 64;
        let ds = 0.02;
        let mut l_x = vec![0.0; n + 1];
        for i in 1..n {
            l_x[i] = 0.04 * (i as f64 * PI / n as f64).sin();
        }
        let lat = LadderLattice {
            t: 0.0,
            l_x: l_x.clone(),
            l_y: vec![ds; n],
            ricci: vec![0.0; n + 1],
        };
        let out = rk4_step_v2(&lat, 1e-4, &cfg(n)).unwrap();
        for i in 0..=n {
            assert_eq!(out.ricci[i], 0.0);
            assert_eq!(out.l_x[i], l_x[i]);
        }
    }

    #[test]
    fn v2_preserves_equatorial_symmetry() {
        let config = FlowConfig {
            c3: 0.766,
            c5: -0.091,
            ..cfg(100)
        };
        let lat = init_lattice(&config).unwrap();
        let dt = select_timestep(&lat, &config).unwrap();
        let out = rk4_step_v2(&lat, dt, &config).unwrap();
        let n = out.n();
        for i in 0..=n {
            let (a, b) = (out.ricci[i], out.ricci[n - i]);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "asym at {i}");
        }
    }

    #[test]
    fn regrid_identity_on_uniform_quadratic_fields() {
        let n = 64;
        let ds = 0.03;
        let total = n as f64 * ds;
        let mut l_x: Vec<f64> = (0..=n)
            .map(|i| {
                let s = i as f64 * ds;
                0.02 * s * (total - s)
            })
            .collect();
        l_x[0] = 0.0;
        l_x[n] = 0.0;
        let lat = LadderLattice {
            t: 0.7,
            l_x: l_x.clone(),
            l_y: vec![ds; n],
            ricci: vec![1.3; n + 1],
        };
        let out = regrid(&lat, &cfg(n)).unwrap();
        assert_eq!(out.t, 0.7);
        for i in 0..=n {
            assert!((out.l_x[i] - l_x[i]).abs() < 1e-12, "l_x[{i}]");
            assert!((out.ricci[i] - 1.3).abs() < 1e-12, "ricci[{i}]");
        }
        // A general (non-even) quadratic is reproduced away from the poles.
        let mut lat2 = lat.clone();
        lat2.ricci = (0..=n).map(|i| {
            let s = i as f64 * ds;
            0.4 + 0.3 * s + 0.2 * s * s
        }).collect();
        let out2 = regrid(&lat2, &cfg(n)).unwrap();
        for i in 1..n {
            assert!((out2.ricci[i] - lat2.ricci[i]).abs() < 1e-12, "ricci[{i}]");
        }
    }

    #[test]
    fn regrid_recovers_sphere_profile_from_perturbed_spacing() {
        let n = 100;
        let dth = 2.0 * PI / 256.0;
        // Smoothly perturbed vertex spacing on the unit sphere.
        let stretch = |x: f64| x + 0.15 * (PI / n as f64) * (3.0 * x).sin();
        let mut s = Vec::with_capacity(n + 1);
        for i in 0..=n {
            s.push(stretch(i as f64 * PI / n as f64));
        }
        let l_y: Vec<f64> = (0..n).map(|i| s[i + 1] - s[i]).collect();
        let mut l_x: Vec<f64> = s.iter().map(|&x| x.sin() * dth).collect();
        l_x[0] = 0.0;
        l_x[n] = 0.0;
        let ricci = vec![2.0; n + 1];
        let lat = LadderLattice {
            t: 0.0,
            l_x,
            l_y,
            ricci,
        };
        let out = regrid(&lat, &cfg(n)).unwrap();
        let total = lat.total_rail_length();
        assert!((out.total_rail_length() - total).abs() <= 1e-12 * total);
        let s_new = out.arclength();
        for i in 1..n {
            // The field is sin(s) dth as a function of arclength, so the
            // regridded values must match it at the new abscissae to the
            // local cubic interpolation error.
            let expect = s_new[i].sin() * dth;
            assert!(
                (out.l_x[i] - expect).abs() < 1e-6,
                "l_x[{i}] err = {}",
                (out.l_x[i] - expect).abs()
            );
        }
    }

    #[test]
    fn run_flow_sphere_reaches_stop_criterion() {
        let config = FlowConfig {
            n: 48,
            snapshot_every: 500,
            ..FlowConfig::default()
        };
        let run = run_flow(&config).unwrap();
        assert_eq!(run.termination, Termination::StopCriterion);
        let last = run.snapshots.last().unwrap();
        let residual = 1.0 - 2.0 * last.t;
        assert!(residual > 0.0 && residual < 0.02, "1 - 2t = {residual}");
        // Total rail length strictly decreases along the flow.
        let mut prev = f64::INFINITY;
        for d in &run.diagnostics {
            let rail = d.min_rail;
            assert!(rail < prev || !d.regrid_performed && rail <= prev);
            prev = rail;
        }
    }

    #[test]
    fn run_flow_zero_steps_returns_initial_only() {
        let config = FlowConfig {
            max_steps: Some(0),
            ..FlowConfig::default()
        };
        let run = run_flow(&config).unwrap();
        assert_eq!(run.termination, Termination::MaxSteps);
        assert_eq!(run.snapshots.len(), 1);
        assert_eq!(run.snapshots[0].t, 0.0);
        assert!(run.diagnostics.is_empty());
    }

    #[test]
    fn run_flow_rejects_fd_method() {
        let config = FlowConfig {
            method: Method::Fd,
            n: 801,
            ..FlowConfig::default()
        };
        assert!(run_flow(&config).is_err());
    }
}
