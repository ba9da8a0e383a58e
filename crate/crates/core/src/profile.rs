//! The two-parameter family of axisymmetric initial data on S^2.
//!
//! The metric is `ds^2 = h(rho) drho^2 + m(rho) dtheta^2` with `h = 1` and
//! `m = w(rho)^2`, where
//!
//! ```text
//! w(rho) = (sin(rho) + c3 sin(3 rho) + c5 sin(5 rho)) / (1 + 3 c3 + 5 c5)
//! ```
//!
//! The normalization makes `w'(0) = 1`, so the surface is smooth at both
//! poles for any choice of the constants. `c3 = c5 = 0` is the unit round
//! sphere; nonzero constants produce dumbbell-like shapes.

use crate::error::{FlowError, Result};

/// Generating profile `w(rho)` of the initial metric, with derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialProfile {
    pub c3: f64,
    pub c5: f64,
    norm: f64,
}

impl InitialProfile {
    pub fn new(c3: f64, c5: f64) -> Result<Self> {
        let norm = 1.0 + 3.0 * c3 + 5.0 * c5;
        if !norm.is_finite() || norm.abs() < 1e-12 {
            return Err(FlowError::InvalidConfig(format!(
                "1 + 3 c3 + 5 c5 = {norm} must be nonzero"
            )));
        }
        Ok(Self { c3, c5, norm })
    }

    /// `w(rho) = sqrt(m(rho))` up to sign.
    pub fn w(&self, rho: f64) -> f64 {
        (rho.sin() + self.c3 * (3.0 * rho).sin() + self.c5 * (5.0 * rho).sin()) / self.norm
    }

    pub fn w1(&self, rho: f64) -> f64 {
        (rho.cos() + 3.0 * self.c3 * (3.0 * rho).cos() + 5.0 * self.c5 * (5.0 * rho).cos())
            / self.norm
    }

    pub fn w2(&self, rho: f64) -> f64 {
        -(rho.sin() + 9.0 * self.c3 * (3.0 * rho).sin() + 25.0 * self.c5 * (5.0 * rho).sin())
            / self.norm
    }

    /// Metric coefficient `m(rho) = w(rho)^2`.
    pub fn m(&self, rho: f64) -> f64 {
        let w = self.w(rho);
        w * w
    }

    /// Ricci scalar of the initial metric at an interior point,
    /// `R = -2 (sqrt m)'' / sqrt m = -2 w'' / w`.
    pub fn ricci(&self, rho: f64) -> f64 {
        -2.0 * self.w2(rho) / self.w(rho)
    }

    /// Total surface area `2 pi Int sqrt(h m) drho = 2 pi Int w drho`,
    /// in closed form.
    pub fn area(&self) -> f64 {
         2.0 * std::f64::consts::PI * (2.0 + 2.0 * self.c3 / 3.0 + 2.0 * self.c5 / 5.0) / self.norm
    }

    /// Extinction time of the flow started from this profile.
    ///
    /// The area of any S^2 geometry under Ricci flow obeys dA/dt = -8 pi,
    /// so the flow ends at `t = A(0) / (8 pi)` regardless of shape.
    pub fn extinction_time(&self) -> f64 {
        self.area() / (8.0 * std::f64::consts::PI)
    }
}
