use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Family, ModelManifold};

/// One-dimensional Gaussian `(4πt)^{−1/2} e^{−z²/4t}` and its first two
/// derivatives in `z`.
fn gaussian(t: f64, z: f64) -> (f64, f64, f64) {
    let g = (4.0 * PI * t).powf(-0.5) * (-z * z / (4.0 * t)).exp();
    (g, -z / (2.0 * t) * g, (z * z / (4.0 * t * t) - 1.0 / (2.0 * t)) * g)
}

/// Number of image shifts on each side so that omitted terms are below
/// `e^{−40}` relative to the leading one.
fn image_count(t: f64, period: f64) -> i64 {
    (((160.0 * t).sqrt() + period) / period).ceil() as i64 + 1
}

/// Wrapped-Gaussian form of the circle kernel.
pub fn circle_kernel_wrapped(t: f64, z: f64) -> f64 {
    let n = image_count(t, TAU);
    (-n..=n).map(|k| gaussian(t, z + TAU * k as f64).0).sum()
}

/// Theta-series form `(1/2π)Σ e^{−k²t} cos(kz)` of the circle kernel.
pub fn circle_kernel_theta(t: f64, z: f64) -> f64 {
    let mut s = 0.0;
    let mut k = 1.0;
    loop {
        let term = (-k * k * t).exp();
        if term < 1e-18 {
            break;
        }
        s += 2.0 * term * (k * z).cos();
        k += 1.0;
    }
    (1.0 + s) / TAU
}

/// `(p, ∂ₓp, ∂ₓ²p)` of the heat kernel `p_t(x, y)` of `∂_t = L`.
///
/// Euclidean, circle, half-line and interval kernels are available; for the
/// radial Euclidean family `x` and `y` are radii of two points on one ray.
pub fn kernel_jet(manifold: &ModelManifold, t: f64, x: f64, y: f64) -> Result<(f64, f64, f64)> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    if !(x.is_finite() && y.is_finite()) {
        return Err(invalid("x", "coordinates must be finite"));
    }
    let c = manifold.drift().value();
    let family = manifold.family();
    if c != 0.0 && !matches!(family, Family::EuclideanLine | Family::Circle) {
        return Err(Error::Unsupported(format!("exact kernel with drift on {family}")));
    }
    // A particle started at x sits at x + ct + √2 B_t, so the density in y is
    // the driftless kernel evaluated at z = x + ct − y.
    let z = x + c * t - y;
    let add = |acc: (f64, f64, f64), g: (f64, f64, f64)| (acc.0 + g.0, acc.1 + g.1, acc.2 + g.2);
    match family {
        Family::EuclideanLine => Ok(gaussian(t, z)),
        Family::EuclideanRadial => {
            let m = manifold.m() as i32;
            let (g, _, _) = gaussian(t, z);
            let p = g * (4.0 * PI * t).powf(-((m - 1) as f64) / 2.0);
            Ok((p, -z / (2.0 * t) * p, (z * z / (4.0 * t * t) - 1.0 / (2.0 * t)) * p))
        }
        Family::Circle => {
            let n = image_count(t, TAU);
            Ok((-n..=n).map(|k| gaussian(t, z + TAU * k as f64)).fold((0.0, 0.0, 0.0), add))
        }
        Family::HalfLineNeumann => {
            if x < 0.0 || y < 0.0 {
                return Err(invalid("x", "half-line coordinates must be >= 0"));
            }
            Ok(add(gaussian(t, x - y), gaussian(t, x + y)))
        }
        Family::IntervalNeumann => {
            let l = manifold.length();
            if x < 0.0 || y < 0.0 || x > l || y > l {
                return Err(invalid("x", format!("interval coordinates must lie in [0, {l}]")));
            }
            let n = image_count(t, 2.0 * l);
            let mut acc = (0.0, 0.0, 0.0);
            for k in -n..=n {
                let shift = 2.0 * l * k as f64;
                acc = add(acc, gaussian(t, x - y + shift));
                acc = add(acc, gaussian(t, x + y + shift));
            }
            Ok(acc)
        }
        f => Err(Error::Unsupported(format!("no closed-form kernel on {f}; use solve_heat"))),
    }
}

/// Heat kernel `p_t(x, y)`.
pub fn exact_kernel(manifold: &ModelManifold, t: f64, x: f64, y: f64) -> Result<f64> {
    if manifold.family() == Family::Circle && t > 1.0 {
        if !(t.is_finite() && x.is_finite() && y.is_finite()) {
            return Err(invalid("t", "arguments must be finite"));
        }
        return Ok(circle_kernel_theta(t, x + manifold.drift().value() * t - y));
    }
    kernel_jet(manifold, t, x, y).map(|j| j.0)
}
