//! Nonuniform finite-difference stencils and the even pole interpolation.

use crate::error::{FlowError, Result};

/// First derivative df/ds at index `i` from the three-point nonuniform
/// stencil. Second-order accurate for any spacing.
///
/// With `h- = s[i] - s[i-1]` and `h+ = s[i+1] - s[i]`:
///
/// ```text
/// f' = (h-^2 f[i+1] + (h+^2 - h-^2) f[i] - h+^2 f[i-1]) / (h+ h- (h+ + h-))
/// ```
pub fn d_ds(f: &[f64], s: &[f64], i: usize) -> Result<f64> {
    let (hm, hp) = spacings(f, s, i)?;
    Ok((hm * hm * f[i + 1] + (hp * hp - hm * hm) * f[i] - hp * hp * f[i - 1])
        / (hp * hm * (hp + hm)))
}

/// Second derivative d2f/ds2 at index `i` from the three-point nonuniform
/// stencil. Second-order accurate on smoothly varying spacings, exact on
/// quadratics at any spacing.
pub fn d2_ds2(f: &[f64], s: &[f64], i: usize) -> Result<f64> {
    let (hm, hp) = spacings(f, s, i)?;
    Ok(2.0 * (hm * f[i + 1] - (hp + hm) * f[i] + hp * f[i - 1]) / (hp * hm * (hp + hm)))
}

fn spacings(f: &[f64], s: &[f64], i: usize) -> Result<(f64, f64)> {
    if i == 0 || i + 1 >= f.len() || f.len() != s.len() {
        return Err(FlowError::StencilOutOfRange {
            index: i,
            len: f.len().min(s.len()),
        });
    }
    let hm = s[i] - s[i - 1];
    let hp = s[i + 1] - s[i];
    if !(hm > 0.0 && hp > 0.0) {
        return Err(FlowError::NonincreasingAbscissae(i));
    }
    Ok((hm, hp))
}

/// Even polynomial interpolation across a pole.
///
/// `samples` are `(s_i, f_i)` pairs with all `s_i > 0` measured from the
/// pole. The unique polynomial of degree `samples.len() - 1` in `u = s^2`
/// through the data is evaluated at each target `s`; the result is an even
/// function of `s` by construction, which both respects the axisymmetry and
/// gains an order over interpolating in `s` directly.
pub fn even_interpolate(samples: &[(f64, f64)], targets: &[f64]) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(FlowError::InvalidState(format!(
            "even interpolation needs >= 2 samples, got {}",
            samples.len()
        )));
    }
    let us: Vec<f64> = samples.iter().map(|&(s, _)| s * s).collect();
    let fs: Vec<f64> = samples.iter().map(|&(_, f)| f).collect();
    let mut max_u: f64 = 0.0;
    for (k, &u) in us.iter().enumerate() {
        if samples[k].0 <= 0.0 {
            return Err(FlowError::InvalidState(format!(
                "sample abscissa s = {} must be positive",
                samples[k].0
            )));
        }
        for &uj in &us[..k] {
            if (u - uj).abs() <= f64::EPSILON * (u.abs() + uj.abs()) {
                return Err(FlowError::CoincidentAbscissae(u));
            }
        }
        max_u = max_u.max(u);
    }
    targets
        .iter()
        .map(|&t| {
            let u = t * t;
            if u > max_u * (1.0 + 1e-12) {
                return Err(FlowError::InterpTargetOutOfRange {
                    target: t,
                    max: max_u.sqrt(),
                });
            }
            Ok(neville(&us, &fs, u))
        })
        .collect()
}

/// Neville's algorithm: evaluate at `x` the unique polynomial through
/// `(xs[k], ys[k])`.
pub(crate) fn neville(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    let mut p = ys.to_vec();
    for level in 1..n {
        for k in 0..n - level {
            p[k] = ((x - xs[k + level]) * p[k] + (xs[k] - x) * p[k + 1]) / (xs[k] - xs[k + level]);
        }
    }
    p[0]
}

/// Quadratic Lagrange interpolation through three points.
pub(crate) fn lagrange3(xs: [f64; 3], ys: [f64; 3], x: f64) -> f64 {
    let [x0, x1, x2] = xs;
    let [y0, y1, y2] = ys;
    y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
        + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
        + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1))
}
