use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::numeric::{x_cot, x_coth};

/// The function `Φ_t` of the Bakry–Bolley–Gentil estimate.
///
/// `K√r·coth(Kt√r)` for `r > 0`, `1/t` at `r = 0` and `K√(−r)·cot(Kt√(−r))`
/// for `−π²/(K²t²) < r < 0`.
pub fn phi_bbg(k: f64, t: f64, r: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(invalid("K", format!("must be positive, got {k}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    if !r.is_finite() {
        return Err(invalid("r", "must be finite"));
    }
    if r <= -(PI * PI) / (k * k * t * t) {
        return Err(Error::OutOfDomain(format!("r = {r} <= -pi^2/(K^2 t^2) = {}", -(PI * PI) / (k * k * t * t))));
    }
    // K√|r| = y/t with y = Kt√|r|.
    let y = k * t * r.abs().sqrt();
    Ok(if r >= 0.0 { x_coth(y) } else { x_cot(y) } / t)
}
