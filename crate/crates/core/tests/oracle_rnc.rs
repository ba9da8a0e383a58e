//! Oracles for the Riemann-normal-coordinate machinery built from exact
//! spherical trigonometry on the unit sphere (R = 2), plus the Laplacian
//! identity checks against closed-form Laplacians on S^2.

use slrf_core::lattice::sphere_lattice;
use slrf_core::rnc::{
    cell_length_residuals, laplacian_identity_check, rnc_length_sq, rnc_tangent,
    solve_cell_perturbative, tangent_continuity_residual, CellLegs,
};
use slrf_core::FlowConfig;

/// 3D point of the unit sphere at geodesic polar radius `r`, azimuth `phi`
/// from the normal-coordinate origin (the north pole).
fn sphere_point(r: f64, phi: f64) -> [f64; 3] {
    [r.sin() * phi.cos(), r.sin() * phi.sin(), r.cos()]
}

fn rnc_of(p: [f64; 3]) -> [f64; 2] {
    let r = p[2].clamp(-1.0, 1.0).acos();
    let phi = p[1].atan2(p[0]);
    [r * phi.cos(), r * phi.sin()]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Exact geodesic distance on the unit sphere.
fn geodesic_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0).acos()
}

#[test]
fn length_formula_matches_spherical_distance_at_fifth_order() {
    // Two generic points near the origin; scaling the configuration down
    // by 2 must shrink the squared-length defect by ~2^6 (the expansion
    // is exact through fifth order).
    let defect = |scale: f64| {
        let pi_pt = sphere_point(0.1 * scale, 0.3);
        let pj_pt = sphere_point(0.12 * scale, 1.1);
        let d = geodesic_distance(pi_pt, pj_pt);
        let l2 = rnc_length_sq(rnc_of(pi_pt), rnc_of(pj_pt), 2.0);
        (l2 - d * d).abs()
    };
    let e1 = defect(1.0);
    let e2 = defect(0.5);
    assert!(e1 < 5e-8, "defect at scale 1: {e1:e}");
    let ratio = e1 / e2;
    assert!(
        (30.0..=130.0).contains(&ratio),
        "defect ratio {ratio} (e1 = {e1:e}, e2 = {e2:e})"
    );
}

#[test]
fn tangent_formula_matches_spherical_geodesic_direction() {
    // Exact initial direction of the geodesic from i to j, mapped into
    // normal-coordinate components by numerical differentiation along the
    // exact great circle.
    let tangent_error = |scale: f64| {
        let pi_pt = sphere_point(0.2 * scale, 0.4);
        let pj_pt = sphere_point(0.23 * scale, 1.3);
        let l = geodesic_distance(pi_pt, pj_pt);
        let t3 = {
            let c = dot(pi_pt, pj_pt);
            let mut t = [0.0; 3];
            let norm = (1.0 - c * c).sqrt();
            for k in 0..3 {
                t[k] = (pj_pt[k] - c * pi_pt[k]) / norm;
            }
            t
        };
        let gamma = |tau: f64| {
            let mut p = [0.0; 3];
            for k in 0..3 {
                p[k] = tau.cos() * pi_pt[k] + tau.sin() * t3[k];
            }
            rnc_of(p)
        };
        let h = 1e-6;
        let (fwd, bwd) = (gamma(h), gamma(-h));
        let exact = [(fwd[0] - bwd[0]) / (2.0 * h), (fwd[1] - bwd[1]) / (2.0 * h)];
        let v = rnc_tangent(rnc_of(pi_pt), rnc_of(pj_pt), l, 2.0).unwrap();
        ((v[0] - exact[0]).powi(2) + (v[1] - exact[1]).powi(2)).sqrt()
    };
    let e1 = tangent_error(1.0);
    let e2 = tangent_error(0.5);
    assert!(e1 < 1e-3, "tangent error at scale 1: {e1:e}");
    assert!(
        e1 / e2 >= 6.0,
        "tangent error should converge at >= third order, ratio {}",
        e1 / e2
    );
}

#[test]
fn tangent_norm_deviates_at_curvature_quadratic_order() {
    // |v|^2 - 1 (Euclidean) is O(R L^2): quarters under halving the scale.
    let norm_defect = |scale: f64| {
        let pi_pt = sphere_point(0.2 * scale, 0.0);
        let pj_pt = sphere_point(0.22 * scale, 0.9);
        let l = geodesic_distance(pi_pt, pj_pt);
        let v = rnc_tangent(rnc_of(pi_pt), rnc_of(pj_pt), l, 2.0).unwrap();
        (v[0] * v[0] + v[1] * v[1] - 1.0).abs()
    };
    let ratio = norm_defect(1.0) / norm_defect(0.5);
    assert!((3.0..=5.0).contains(&ratio), "norm defect ratio {ratio}");
}

/// Deterministic congruential generator for reproducible random cells.
struct Lcg(u64);

impl Lcg {
    fn next_unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

#[test]
fn cell_solution_residuals_scale_as_curvature_squared() {
    // 100 randomized admissible cells with |R| max(leg)^2 < 0.05: the
    // back-substituted leg-length residuals are O(R^2), so halving R
    // shrinks the largest residual by 4 (within 0.5).
    let mut rng = Lcg(0x5eed_cafe);
    let mut checked = 0;
    while checked < 100 {
        let l_xo = rng.in_range(0.02, 0.06);
        let legs = CellLegs {
            l_xo,
            l_xp: l_xo * rng.in_range(0.8, 1.2),
            l_xm: l_xo * rng.in_range(0.8, 1.2),
            ds_p: rng.in_range(0.03, 0.08),
            ds_m: rng.in_range(0.03, 0.08),
        };
        let scale = legs.max_leg();
        let ricci = rng.in_range(0.5, 2.0).min(0.05 / (scale * scale));
        let max_res = |r: f64| {
            let cell = solve_cell_perturbative(legs, r).unwrap();
            cell_length_residuals(&cell)
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max)
        };
        let r_full = max_res(ricci);
        let r_half = max_res(0.5 * ricci);
        let ratio = r_full / r_half;
        assert!(
            (3.5..=4.5).contains(&ratio),
            "cell {checked}: residual ratio {ratio} (full {r_full:e}, half {r_half:e}, legs {legs:?})"
        );
        checked += 1;
    }
}

#[test]
fn continuity_residual_converges_on_sphere_geodesic_cells() {
    // Cells sampled from exact unit-sphere data: rails along meridians
    // (arclength exact), rungs the exact geodesic spans of a fixed azimuth
    // opening. The discrete continuity residual converges at better than
    // second order in the rail spacing.
    let rung = |theta: f64, dphi: f64| {
        let c = theta.cos().powi(2) + theta.sin().powi(2) * dphi.cos();
        c.clamp(-1.0, 1.0).acos()
    };
    let residual = |ds: f64| {
        let theta = 1.0;
        let dphi = 0.02;
        let legs = CellLegs {
            l_xo: rung(theta, dphi),
            l_xp: rung(theta + ds, dphi),
            l_xm: rung(theta - ds, dphi),
            ds_p: ds,
            ds_m: ds,
        };
        let cell = solve_cell_perturbative(legs, 2.0).unwrap();
        tangent_continuity_residual(&cell).abs()
    };
    let e1 = residual(0.08);
    let e2 = residual(0.04);
    let order = (e1 / e2).log2();
    assert!(
        order >= 2.0,
        "continuity residual order {order} (e1 = {e1:e}, e2 = {e2:e})"
    );
}

#[test]
fn laplacian_identity_for_cos_modes() {
    let dth = 2.0 * std::f64::consts::PI / 256.0;
    let check = |n: usize, mode: u32| {
        let lat = sphere_lattice(n, dth, 1.0);
        let cfg = FlowConfig {
            n,
            ..FlowConfig::default()
        };
        let s = lat.arclength();
        let (f, expect): (Vec<f64>, Vec<f64>) = match mode {
            1 => (
                s.iter().map(|&x| x.cos()).collect(),
                s.iter().map(|&x| -2.0 * x.cos()).collect(),
            ),
            _ => (
                s.iter().map(|&x| (2.0 * x).cos()).collect(),
                // Lap cos(2s) = -4 cos 2s - 2 cot(s) sin 2s = -4(3cos^2 s - 1)
                s.iter().map(|&x| -4.0 * (3.0 * x.cos().powi(2) - 1.0)).collect(),
            ),
        };
        laplacian_identity_check(&lat, &cfg, &f, &expect).unwrap()
    };

    // Constant field: identically zero Laplacian.
    let lat = sphere_lattice(100, dth, 1.0);
    let cfg = FlowConfig::default();
    let zero = laplacian_identity_check(&lat, &cfg, &vec![5.0; 101], &vec![0.0; 101]).unwrap();
    assert!(zero < 1e-10, "constant-field error {zero:e}");

    for mode in [1, 2] {
        let e100 = check(100, mode);
        let e200 = check(200, mode);
        let ratio = e100 / e200;
        assert!(
            (3.2..=4.8).contains(&ratio),
            "mode {mode}: ratio {ratio} (e100 = {e100:e}, e200 = {e200:e})"
        );
    }
}
