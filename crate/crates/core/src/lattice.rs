//! The ladder lattice: state, initial data and the ghost extension over
//! the poles.
//!
//! The lattice is two pole-to-pole geodesic rails joined by transverse
//! rungs. Vertex `i` runs from 0 (north pole) to N (south pole); `l_x[i]`
//! is the rung length through vertex `i`, `l_y[i]` the rail segment joining
//! vertices `i` and `i + 1`, and `ricci[i]` the Ricci scalar at vertex `i`.

use crate::config::FlowConfig;
use crate::error::{FlowError, Result};
use crate::profile::InitialProfile;
use crate::stencil::even_interpolate;

/// Discrete state of the axisymmetric lattice at one flow time.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderLattice {
    /// Flow time.
    pub t: f64,
    /// Rung lengths, one per vertex; exactly zero at both poles.
    pub l_x: Vec<f64>,
    /// Rail segment lengths, `l_y[i]` spans vertices `i` and `i + 1`.
    pub l_y: Vec<f64>,
    /// Ricci scalar per vertex.
    pub ricci: Vec<f64>,
}

impl LadderLattice {
    /// Rail segment count N.
    pub fn n(&self) -> usize {
        self.l_y.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.l_x.len()
    }

    /// Cumulative arclength from the north pole: `s[0] = 0`,
    /// `s[i+1] = s[i] + l_y[i]`.
    pub fn arclength(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.n_vertices());
        s.push(0.0);
        let mut acc = 0.0;
        for &l in &self.l_y {
            acc += l;
            s.push(acc);
        }
        s
    }

    /// Arclength measured from the south pole, accumulated southward so a
    /// mirror-symmetric lattice yields bitwise-mirrored values.
    pub fn arclength_from_south(&self) -> Vec<f64> {
        let n = self.n();
        let mut s = vec![0.0; n + 1];
        let mut acc = 0.0;
        for i in (0..n).rev() {
            acc += self.l_y[i];
            s[i] = acc;
        }
        s
    }

    /// Total rail length from pole to pole.
    pub fn total_rail_length(&self) -> f64 {
        self.l_y.iter().sum()
    }

    pub fn min_rail(&self) -> f64 {
        self.l_y.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_rail(&self) -> f64 {
        self.l_y.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_interior_rung(&self) -> f64 {
        self.l_x[1..self.n()]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Check the structural invariants: pole rungs pinned to zero, interior
    /// rungs and all rail segments strictly positive, everything finite.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.l_x.len() != n + 1 || self.ricci.len() != n + 1 {
            return Err(FlowError::InvalidState(format!(
                "field lengths disagree: l_x {}, l_y {}, ricci {}",
                self.l_x.len(),
                n,
                self.ricci.len()
            )));
        }
        if n < 8 || n % 2 != 0 {
            return Err(FlowError::InvalidState(format!(
                "need an even segment count >= 8, got {n}"
            )));
        }
        if self.l_x[0] != 0.0 || self.l_x[n] != 0.0 {
            return Err(FlowError::InvalidState(
                "pole rungs must be exactly zero".into(),
            ));
        }
        for (i, &v) in self.l_x[1..n].iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::NonpositiveRung {
                    index: i + 1,
                    value: v,
                });
            }
        }
        for (i, &v) in self.l_y.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::RailCollapse { index: i, value: v });
            }
        }
        if self.ricci.iter().any(|v| !v.is_finite()) || !self.t.is_finite() {
            return Err(FlowError::NonFinite("lattice state".into()));
        }
        Ok(())
    }
}

/// Lattice data extended past both poles by the rotational symmetry.
///
/// Vertex indices run over `-m_g ..= N + m_g`. Across the north pole the
/// rungs continue with flipped sign, the Ricci scalar evenly, and ghost
/// rail segment `-j` (spanning vertices `-j` and `-j + 1`) copies segment
/// `j - 1`, which makes the extension the exact mirror image through the
/// pole. The south pole mirrors the same rules.
#[derive(Debug, Clone)]
pub struct GhostView {
    margin: usize,
    n: usize,
    l_x: Vec<f64>,
    l_y: Vec<f64>,
    ricci: Vec<f64>,
    s: Vec<f64>,
}

impl GhostView {
    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, i: isize) -> usize {
        (i + self.margin as isize) as usize
    }

    /// Rung length at vertex `i` in `-m_g ..= N + m_g`. Ghost values are
    /// signed.
    pub fn l_x(&self, i: isize) -> f64 {
        self.l_x[self.idx(i)]
    }

    /// Rail segment spanning vertices `i` and `i + 1`, for
    /// `i` in `-m_g ..= N + m_g - 1`.
    pub fn l_y(&self, i: isize) -> f64 {
        self.l_y[self.idx(i)]
    }

    pub fn ricci(&self, i: isize) -> f64 {
        self.ricci[self.idx(i)]
    }

    /// Arclength abscissa of vertex `i`, with `s(0) = 0`; strictly
    /// increasing over the whole extended range.
    pub fn s(&self, i: isize) -> f64 {
        self.s[self.idx(i)]
    }

    /// Extended rung lengths as a flat slice together with the arclength
    /// abscissae; entry `k` is vertex `k - m_g`.
    pub fn l_x_raw(&self) -> (&[f64], &[f64]) {
        (&self.l_x, &self.s)
    }

    pub fn ricci_raw(&self) -> (&[f64], &[f64]) {
        (&self.ricci, &self.s)
    }

    /// Extend an arbitrary per-vertex field evenly across both poles,
    /// aligned with this view's indexing.
    pub fn extend_even(&self, f: &[f64]) -> Vec<f64> {
        let (m, n) = (self.margin, self.n);
        assert_eq!(f.len(), n + 1, "field must have one value per vertex");
        let mut out = Vec::with_capacity(n + 1 + 2 * m);
        for j in (1..=m).rev() {
            out.push(f[j]);
        }
        out.extend_from_slice(f);
        for j in 1..=m {
            out.push(f[n - j]);
        }
        out
    }
}

/// Extend the lattice data across both poles to depth `m_g`.
pub fn extend_over_poles(lattice: &LadderLattice, m_g: usize) -> Result<GhostView> {
    let n = lattice.n();
    if m_g == 0 || m_g >= n / 2 {
        return Err(FlowError::InvalidState(format!(
            "ghost depth {m_g} must satisfy 0 < m_g < N/2 = {}",
            n / 2
        )));
    }

    let mut l_x = Vec::with_capacity(n + 1 + 2 * m_g);
    let mut ricci = Vec::with_capacity(n + 1 + 2 * m_g);
    let mut l_y = Vec::with_capacity(n + 2 * m_g);

    for j in (1..=m_g).rev() {
        l_x.push(-lattice.l_x[j]);
        ricci.push(lattice.ricci[j]);
    }
    l_x.extend_from_slice(&lattice.l_x);
    ricci.extend_from_slice(&lattice.ricci);
    for j in 1..=m_g {
        l_x.push(-lattice.l_x[n - j]);
        ricci.push(lattice.ricci[n - j]);
    }

    // Ghost segment -j spans vertices (-j, -j + 1) and copies segment j - 1;
    // segment N - 1 + j spans (N - 1 + j, N + j) and copies segment N - j.
    for j in (1..=m_g).rev() {
        l_y.push(lattice.l_y[j - 1]);
    }
    l_y.extend_from_slice(&lattice.l_y);
    for j in 1..=m_g {
        l_y.push(lattice.l_y[n - j]);
    }

    // Abscissae: ghost vertices sit at the negated (north) and reflected
    // (south) partial sums, so a symmetric lattice extends bitwise-mirrored.
    let interior = lattice.arclength();
    let s_n = interior[n];
    let mut s = Vec::with_capacity(n + 1 + 2 * m_g);
    for j in (1..=m_g).rev() {
        s.push(-interior[j]);
    }
    s.extend_from_slice(&interior);
    let from_south = lattice.arclength_from_south();
    for j in 1..=m_g {
        s.push(s_n + from_south[n - j]);
    }

    Ok(GhostView {
        margin: m_g,
        n,
        l_x,
        l_y,
        ricci,
        s,
    })
}

/// Build the t = 0 lattice from the initial metric.
///
/// Vertices sit at `rho_i = i pi / N`. Since `h = 1`, each rail segment is
/// exactly `pi / N` of arclength; the rung through vertex `i` subtends the
/// fixed azimuthal angle `delta_theta`, giving `l_x[i] = w(rho_i) delta_theta`.
/// The Ricci scalars are seeded analytically (or from the rungs when
/// `seed_r_from_legs` is set) with the near-pole values filled by even
/// interpolation. Everything south of the equator is set by reflection so
/// the symmetry holds bitwise.
pub fn init_lattice(config: &FlowConfig) -> Result<LadderLattice> {
    config.validate()?;
    let profile = InitialProfile::new(config.c3, config.c5)?;
    let n = config.n;
    let half = n / 2;
    let d_rho = std::f64::consts::PI / n as f64;

    let mut l_x = vec![0.0; n + 1];
    let mut ricci = vec![0.0; n + 1];
    for i in 1..=half {
        let rho = i as f64 * d_rho;
        let w = profile.w(rho);
        if w <= 0.0 {
            return Err(FlowError::DegenerateInitialData(format!(
                "m(rho) <= 0 at rho = {rho} (interior vertex {i})"
            )));
        }
        l_x[i] = w * config.delta_theta;
        ricci[i] = profile.ricci(rho);
    }
    for i in half + 1..n {
        l_x[i] = l_x[n - i];
        ricci[i] = ricci[n - i];
    }

    let l_y = vec![d_rho; n];
    let mut lattice = LadderLattice {
        t: 0.0,
        l_x,
        l_y,
        ricci,
    };

    if config.seed_r_from_legs {
        lattice.ricci = crate::engine::curvature_from_legs(&lattice, config)?;
    } else {
        // Poles by even interpolation of the analytic interior values.
        let s = lattice.arclength();
        let samples: Vec<(f64, f64)> = (config.interp_start..=config.ghost_depth)
            .map(|i| (s[i], lattice.ricci[i]))
            .collect();
        let north = even_interpolate(&samples, &[0.0])?;
        lattice.ricci[0] = north[0];
        let s_south = lattice.arclength_from_south();
        let samples: Vec<(f64, f64)> = (config.interp_start..=config.ghost_depth)
            .map(|i| (s_south[n - i], lattice.ricci[n - i]))
            .collect();
        let south = even_interpolate(&samples, &[0.0])?;
        lattice.ricci[n] = south[0];
    }

    lattice.validate()?;
    Ok(lattice)
}

/// The analytic unit-sphere lattice at radius `r`, used throughout the
/// tests: `l_x = r sin(s / r) delta_theta` on uniform rail segments.
pub fn sphere_lattice(n: usize, delta_theta: f64, r: f64) -> LadderLattice {
    let ds = r * std::f64::consts::PI / n as f64;
    let mut l_x = vec![0.0; n + 1];
    for i in 1..n {
        l_x[i] = r * (i as f64 * std::f64::consts::PI / n as f64).sin() * delta_theta;
    }
    let ricci = vec![2.0 / (r * r); n + 1];
    LadderLattice {
        t: 0.0,
        l_x,
        l_y: vec![ds; n],
        ricci,
    }
}
