//! Finite-difference reference solver on the metric form
//! `ds^2 = h(rho) drho^2 + m(rho) dtheta^2`, `0 <= rho <= pi`.
//!
//! The flow equations for the interior are
//!
//! ```text
//! dm/dt = -(m')^2/(2mh) + m''/h - m' h'/(2h^2)
//! dh/dt = -(m')^2/(2m^2) + m''/m - m' h'/(2mh)
//! ```
//!
//! which the solver evaluates through the substitution `p = sqrt(m)`:
//!
//! ```text
//! dm/dt = p (2p''/h - p'h'/h^2),      dh/dt = (2p'' - p'h'/h) / p
//! ```
//!
//! The two forms are identical in the continuum, but the `p` form stays
//! uniformly second-order accurate up to the first interior point, where
//! stencils on `m ~ rho^2` itself lose all accuracy to cancellation. At the
//! poles `dm/dt = 0` and `dh/dt = m''''/(2m'') - h''/h`, the sign fixed by
//! the interior limit (a round sphere has dh/dt = -2 everywhere).
//!
//! In this gauge `h` carries no diffusion of its own (`dh/dt = (h/m) dm/dt`
//! pointwise), and integrating the pole rate explicitly feeds back through
//! `-h''/h` with a positive eigenvalue `~2/(h drho^2)`, divergent at any
//! Courant factor since `dt ~ drho^2`. The stepper therefore re-anchors the
//! near-pole `h` values each step by even interpolation from the interior,
//! the same closure the lattice solver uses for its near-pole data.

use crate::config::{FdScheme, FlowConfig, Method};
use crate::engine::{StepDiagnostics, Termination};
use crate::error::{FlowError, Result};
use crate::profile::InitialProfile;
use crate::stencil::{even_interpolate, lagrange3, neville};

/// Finite-difference state: the metric coefficients sampled on a uniform
/// rho grid over `[0, pi]` inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGrid {
    pub t: f64,
    pub h: Vec<f64>,
    pub m: Vec<f64>,
}

impl MetricGrid {
    pub fn n_points(&self) -> usize {
        self.h.len()
    }

    pub fn delta_rho(&self) -> f64 {
        std::f64::consts::PI / (self.n_points() - 1) as f64
    }

    pub fn rho(&self, i: usize) -> f64 {
        i as f64 * self.delta_rho()
    }

    /// Structural invariants: h positive everywhere, m positive on the
    /// interior and exactly zero at the poles.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_points();
        if self.m.len() != n || n < 9 {
            return Err(FlowError::InvalidState(format!(
                "grid needs matching h/m with >= 9 points, got {} and {}",
                n,
                self.m.len()
            )));
        }
        for (i, &v) in self.h.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::LostPositivity { index: i, value: v });
            }
        }
        if self.m[0] != 0.0 || self.m[n - 1] != 0.0 {
            return Err(FlowError::InvalidState("m must vanish exactly at the poles".into()));
        }
        for (i, &v) in self.m[1..n - 1].iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::MetricCollapse {
                    index: i + 1,
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Sample the two-parameter initial data on `n_points` grid points.
pub fn init_metric(c3: f64, c5: f64, n_points: usize) -> Result<MetricGrid> {
    if n_points < 9 {
        return Err(FlowError::InvalidConfig(format!(
            "fd grid needs >= 9 points, got {n_points}"
        )));
    }
    let profile = InitialProfile::new(c3, c5)?;
    let d_rho = std::f64::consts::PI / (n_points - 1) as f64;
    let mut m = vec![0.0; n_points];
    for (i, mi) in m.iter_mut().enumerate().take(n_points - 1).skip(1) {
        let w = profile.w(i as f64 * d_rho);
        if w <= 0.0 {
            return Err(FlowError::DegenerateInitialData(format!(
                "m(rho) <= 0 at interior grid point {i}"
            )));
        }
        *mi = w * w;
    }
    let grid = MetricGrid {
        t: 0.0,
        h: vec![1.0; n_points],
        m,
    };
    grid.validate()?;
    Ok(grid)
}

/// Flow rates at the interior points `0 < i < n - 1`; pole entries are
/// left at zero.
pub fn fd_rhs_interior(grid: &MetricGrid) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = grid.n_points();
    grid.validate()?;
    let a = grid.delta_rho();
    let p: Vec<f64> = grid.m.iter().map(|&v| v.sqrt()).collect();

    let mut dm = vec![0.0; n];
    let mut dh = vec![0.0; n];
    for i in 1..n - 1 {
        let p1 = (p[i + 1] - p[i - 1]) / (2.0 * a);
        let p2 = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (a * a);
        let h1 = (grid.h[i + 1] - grid.h[i - 1]) / (2.0 * a);
        let h = grid.h[i];
        dm[i] = p[i] * (2.0 * p2 / h - p1 * h1 / (h * h));
        dh[i] = (2.0 * p2 - p1 * h1 / h) / p[i];
    }
    Ok((dm, dh))
}

/// Flow rates at the two poles: `(dm/dt, dh/dt)` for `i = 0` and
/// `i = n - 1`. `dm/dt` vanishes identically; `dh/dt` uses centered
/// stencils on the even extensions of `m` and `h` across the pole
/// (5-point for `m''''`).
pub fn fd_rhs_poles(grid: &MetricGrid) -> Result<[(f64, f64); 2]> {
    let n = grid.n_points();
    if n < 5 {
        return Err(FlowError::InvalidState(
            "pole stencils need at least 5 points of one-sided data".into(),
        ));
    }
    let a = grid.delta_rho();
    let a2 = a * a;

    let pole = |m0: f64, m1: f64, m2: f64, h0: f64, h1: f64| -> Result<f64> {
        let m_dd = 2.0 * (m1 - m0) / a2;
        if m_dd <= 0.0 {
            return Err(FlowError::InvalidState(format!(
                "degenerate cap: m'' = {m_dd} at a pole"
            )));
        }
        let m_dddd = (2.0 * m2 - 8.0 * m1 + 6.0 * m0) / (a2 * a2);
        let h_dd = 2.0 * (h1 - h0) / a2;
        Ok(m_dddd / (2.0 * m_dd) - h_dd / h0)
    };

    let north = pole(grid.m[0], grid.m[1], grid.m[2], grid.h[0], grid.h[1])?;
    let south = pole(
        grid.m[n - 1],
        grid.m[n - 2],
        grid.m[n - 3],
        grid.h[n - 1],
        grid.h[n - 2],
    )?;
    Ok([(0.0, north), (0.0, south)])
}

fn fd_rhs(grid: &MetricGrid) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut dm, mut dh) = fd_rhs_interior(grid)?;
    let n = grid.n_points();
    let [(dm0, dh0), (dm1, dh1)] = fd_rhs_poles(grid)?;
    dm[0] = dm0;
    dh[0] = dh0;
    dm[n - 1] = dm1;
    dh[n - 1] = dh1;
    Ok((dm, dh))
}

/// Largest interior Ricci scalar, from `R = -(dm/dt) / m`.
pub fn max_interior_ricci(grid: &MetricGrid) -> Result<f64> {
    let (dm, _) = fd_rhs_interior(grid)?;
    let mut max_r = f64::NEG_INFINITY;
    for i in 1..grid.n_points() - 1 {
        max_r = max_r.max(-dm[i] / grid.m[i]);
    }
    Ok(max_r)
}

/// Replace the near-pole values of an even grid field (indices `< n_g`
/// from either end, poles included) by even interpolation in distance^2
/// from the entries at `n_g ..= m_g`.
fn pole_fill_even(values: &mut [f64], d_rho: f64, n_g: usize, m_g: usize) -> Result<()> {
    let n = values.len();
    let targets: Vec<f64> = (0..n_g).map(|k| k as f64 * d_rho).collect();

    let samples: Vec<(f64, f64)> = (n_g..=m_g).map(|k| (k as f64 * d_rho, values[k])).collect();
    let filled = even_interpolate(&samples, &targets)?;
    values[..n_g].copy_from_slice(&filled);

    let samples: Vec<(f64, f64)> = (n_g..=m_g)
        .map(|k| (k as f64 * d_rho, values[n - 1 - k]))
        .collect();
    let filled = even_interpolate(&samples, &targets)?;
    for (k, v) in filled.into_iter().enumerate() {
        values[n - 1 - k] = v;
    }
    Ok(())
}

/// Restore smoothness of `sqrt(m)` near the poles.
///
/// `sqrt(m)` is an odd function of the distance from either pole, so
/// `sqrt(m)/rho` is even; that ratio is interpolated in `rho^2` from the
/// samples at distance indices `n_g ..= m_g` and evaluated inward,
/// replacing the indices `0 < j < n_g`. The interior is untouched.
pub fn smoothness_repair(grid: &MetricGrid, n_g: usize, m_g: usize) -> Result<MetricGrid> {
    let n = grid.n_points();
    if n_g == 0 || n_g >= m_g || m_g >= n / 2 {
        return Err(FlowError::InvalidConfig(format!(
            "repair needs 0 < n_g < m_g < n/2, got {n_g}, {m_g}"
        )));
    }
    let a = grid.delta_rho();
    let mut out = grid.clone();

    let mut fit = |index_of: &dyn Fn(usize) -> usize| {
        let us: Vec<f64> = (n_g..=m_g).map(|k| (k as f64 * a) * (k as f64 * a)).collect();
        let gs: Vec<f64> = (n_g..=m_g)
            .map(|k| grid.m[index_of(k)].sqrt() / (k as f64 * a))
            .collect();
        for k in 1..n_g {
            let rho = k as f64 * a;
            let root = rho * neville(&us, &gs, rho * rho);
            out.m[index_of(k)] = root * root;
        }
    };
    fit(&|k| k);
    fit(&|k| n - 1 - k);
    Ok(out)
}

/// Advance the grid by one step of the chosen scheme, re-anchor the
/// near-pole `h` values by even interpolation and re-apply the smoothness
/// repair to `sqrt(m)`.
pub fn fd_step(
    grid: &MetricGrid,
    dt: f64,
    scheme: FdScheme,
    config: &FlowConfig,
) -> Result<MetricGrid> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(FlowError::InvalidTimestep(dt));
    }
    let n = grid.n_points();
    let advance = |h: &[f64], m: &[f64], c: f64, dh: &[f64], dm: &[f64]| -> MetricGrid {
        MetricGrid {
            t: grid.t,
            h: h.iter().zip(dh).map(|(&v, &d)| v + c * d).collect(),
            m: m.iter().zip(dm).map(|(&v, &d)| v + c * d).collect(),
        }
    };

    let mut next = match scheme {
        FdScheme::Ftcs => {
            let (dm, dh) = fd_rhs(grid)?;
            advance(&grid.h, &grid.m, dt, &dh, &dm)
        }
        FdScheme::Rk4 => {
            let (dm1, dh1) = fd_rhs(grid)?;
            let s2 = advance(&grid.h, &grid.m, 0.5 * dt, &dh1, &dm1);
            let (dm2, dh2) = fd_rhs(&s2)?;
            let s3 = advance(&grid.h, &grid.m, 0.5 * dt, &dh2, &dm2);
            let (dm3, dh3) = fd_rhs(&s3)?;
            let s4 = advance(&grid.h, &grid.m, dt, &dh3, &dm3);
            let (dm4, dh4) = fd_rhs(&s4)?;
            let mut out = grid.clone();
            for i in 0..n {
                out.h[i] += dt / 6.0 * (dh1[i] + 2.0 * dh2[i] + 2.0 * dh3[i] + dh4[i]);
                out.m[i] += dt / 6.0 * (dm1[i] + 2.0 * dm2[i] + 2.0 * dm3[i] + dm4[i]);
            }
            out
        }
    };
    next.t = grid.t + dt;
    pole_fill_even(&mut next.h, grid.delta_rho(), config.interp_start, config.ghost_depth)?;
    next.validate()?;
    let repaired = smoothness_repair(&next, config.interp_start, config.ghost_depth)?;
    repaired.validate()?;
    Ok(repaired)
}

/// Resample onto a grid uniform in proper arclength.
///
/// The arclength parameter `sigma = Int sqrt(h) drho` is rescaled back to
/// `[0, pi]`, which makes the new `h` the constant `(S/pi)^2`; `m` moves to
/// the new abscissae by quadratic interpolation in `sigma`. The geometry is
/// unchanged up to interpolation error.
pub fn reparametrize(grid: &MetricGrid) -> Result<MetricGrid> {
    grid.validate()?;
    let n = grid.n_points();
    let a = grid.delta_rho();

    let mut sigma = Vec::with_capacity(n);
    sigma.push(0.0);
    let mut acc = 0.0;
    for i in 0..n - 1 {
        acc += 0.5 * a * (grid.h[i].sqrt() + grid.h[i + 1].sqrt());
        sigma.push(acc);
    }
    let total = sigma[n - 1];
    let scale = total / std::f64::consts::PI;

    let mut m = vec![0.0; n];
    for (i, mi) in m.iter_mut().enumerate().take(n - 1).skip(1) {
        let target = i as f64 * total / (n - 1) as f64;
        let j = sigma.partition_point(|&v| v < target).saturating_sub(1).min(n - 2);
        let center = if target - sigma[j] <= sigma[j + 1] - target {
            j
        } else {
            j + 1
        }
        .clamp(1, n - 2);
        *mi = lagrange3(
            [sigma[center - 1], sigma[center], sigma[center + 1]],
            [grid.m[center - 1], grid.m[center], grid.m[center + 1]],
            target,
        );
    }

    let out = MetricGrid {
        t: grid.t,
        h: vec![scale * scale; n],
        m,
    };
    out.validate()?;
    Ok(out)
}

/// Output of [`run_fd`], the finite-difference counterpart of
/// [`crate::engine::FlowRun`].
#[derive(Debug, Clone)]
pub struct FdRun {
    pub snapshots: Vec<MetricGrid>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub termination: Termination,
}

/// Adaptive step for the reference solver: `C (min h) (delta rho)^2`, the
/// diffusion-stable scale of the interior equations.
pub fn fd_select_timestep(grid: &MetricGrid, config: &FlowConfig) -> Result<f64> {
    if let Some(dt) = config.fd_dt {
        return Ok(dt);
    }
    let min_h = grid.h.iter().copied().fold(f64::INFINITY, f64::min);
    let a = grid.delta_rho();
    let dt = config.courant_factor * min_h * a * a;
    if dt > 0.0 && dt.is_finite() {
        Ok(dt)
    } else {
        Err(FlowError::InvalidTimestep(dt))
    }
}

/// Drive the reference solver from the initial data to the stop criterion,
/// mirroring the lattice run loop (reparametrization stands in for the
/// regrid).
pub fn run_fd(config: &FlowConfig) -> Result<FdRun> {
    config.validate()?;
    if config.method != Method::Fd {
        return Err(FlowError::InvalidConfig(
            "run_fd drives the reference solver; use run_flow for the lattice methods".into(),
        ));
    }
    let mut grid = init_metric(config.c3, config.c5, config.n)?;
    let mut snapshots = vec![grid.clone()];
    let mut diagnostics = Vec::new();

    let mut targets = config.snapshot_times.clone();
    targets.sort_by(|x, y| x.partial_cmp(y).expect("finite snapshot times"));
    let mut next_target = targets.partition_point(|&t| t <= 0.0);

    let mut dt_initial = None;
    let mut step = 0usize;
    let mut last_snapshot_step = 0usize;

    let termination = loop {
        if config.max_steps.is_some_and(|cap| step >= cap) {
            break Termination::MaxSteps;
        }
        let dt = match fd_select_timestep(&grid, config) {
            Ok(dt) => dt,
            Err(e) => break Termination::Failed(e),
        };
        let dt0 = *dt_initial.get_or_insert(dt);
        if dt < dt0 / config.stop_factor {
            break Termination::StopCriterion;
        }
        grid = match fd_step(&grid, dt, config.fd_scheme, config) {
            Ok(next) => next,
            Err(e) => break Termination::Failed(e),
        };
        step += 1;

        let mut regridded = false;
        if config.regrid_every > 0 && step % config.regrid_every == 0 {
            match reparametrize(&grid) {
                Ok(next) => {
                    grid = next;
                    regridded = true;
                }
                Err(e) => break Termination::Failed(e),
            }
        }

        let max_ricci = match max_interior_ricci(&grid) {
            Ok(r) => r,
            Err(e) => break Termination::Failed(e),
        };
        let min_h = grid.h.iter().copied().fold(f64::INFINITY, f64::min);
        let min_m = grid.m[1..grid.n_points() - 1]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        diagnostics.push(StepDiagnostics {
            step_index: step,
            t: grid.t,
            dt,
            max_ricci,
            min_rail: min_h.sqrt() * grid.delta_rho(),
            min_interior_rung: min_m.sqrt(),
            regrid_performed: regridded,
        });

        let mut want = config.snapshot_every > 0 && step % config.snapshot_every == 0;
        while next_target < targets.len() && grid.t >= targets[next_target] {
            want = true;
            next_target += 1;
        }
        if want {
            snapshots.push(grid.clone());
            last_snapshot_step = step;
        }
    };

    if last_snapshot_step != step {
        snapshots.push(grid.clone());
    }
    Ok(FdRun {
        snapshots,
        diagnostics,
        termination,
    })
}
