use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// `(9π² − 64)/(9π²)`, the smallest admissible `(1+α)/(Kt)`.
pub const BETA_DOMAIN_FLOOR: f64 = (9.0 * PI * PI - 64.0) / (9.0 * PI * PI);

/// `√((1+α)/(Kt) − (9π²−64)/(9π²)) − 8/(3π)`.
///
/// This is the root of `β² + (16/(3π))β + 1 − (1+α)/(Kt) = 0` that makes the
/// trigonometric clock with amplitude `β` satisfy `2K∫ℓ²e^{−2Ks} = 1 + α`.
pub fn beta_t_alpha(k: f64, t: f64, alpha: f64) -> Result<f64> {
    if !(k.is_finite() && k != 0.0) {
        return Err(invalid("K", format!("must be non-zero, got {k}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let ratio = (1.0 + alpha) / (k * t);
    if !(ratio >= BETA_DOMAIN_FLOOR) {
        return Err(Error::OutOfDomain(format!("(1+alpha)/(Kt) = {ratio} is below {BETA_DOMAIN_FLOOR}")));
    }
    Ok((ratio - BETA_DOMAIN_FLOOR).sqrt() - 8.0 / (3.0 * PI))
}

fn check_ball(n: f64, k_region: f64, radius: f64) -> Result<()> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(invalid("n", format!("must be >= 1, got {n}")));
    }
    if !(k_region.is_finite() && k_region >= 0.0) {
        return Err(invalid("k_region", format!("must be >= 0, got {k_region}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid("R", format!("must be positive, got {radius}")));
    }
    Ok(())
}

/// `β_{ε,R}` for the ball of radius `R` with the cosine cutoff.
pub fn beta_eps_radius(n: f64, k_region: f64, radius: f64, eps: f64) -> Result<f64> {
    check_ball(n, k_region, radius)?;
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    let r2 = radius * radius;
    Ok(2.0 * k_region
        + PI / (2.0 * radius) * (k_region * (n - 1.0)).sqrt()
        + PI * PI / (4.0 * r2) * (4.0 + ((1.0 + eps).powi(2) / eps + 2.0) * n))
}

/// `β̃_{α,R}` for the ball of radius `R` with the cosine cutoff.
pub fn beta_tilde_radius(n: f64, k_region: f64, radius: f64, alpha: f64) -> Result<f64> {
    check_ball(n, k_region, radius)?;
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid("alpha", format!("must exceed 1, got {alpha}")));
    }
    let r2 = radius * radius;
    Ok(PI * PI / (2.0 * r2) * (2.0 + n + n * alpha * alpha / (2.0 * (alpha - 1.0)))
        + PI / (2.0 * radius) * (k_region * (n - 1.0)).sqrt()
        + 2.0 * k_region / (alpha - 1.0))
}

/// Both local exponents `(β_{ε,R}, β̃_{α,R})`.
pub fn local_betas(n: f64, k_region: f64, radius: f64, eps: f64, alpha: f64) -> Result<(f64, f64)> {
    Ok((beta_eps_radius(n, k_region, radius, eps)?, beta_tilde_radius(n, k_region, radius, alpha)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_vanishes_when_ratio_is_one() {
        assert!(beta_t_alpha(1.0, 2.0, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn beta_at_domain_floor() {
        // (1+α)/(Kt) equal to the floor: α = floor·Kt − 1.
        let alpha = BETA_DOMAIN_FLOOR * 2.0 - 1.0;
        let b = beta_t_alpha(1.0, 2.0, alpha).unwrap();
        assert!((b + 8.0 / (3.0 * PI)).abs() < 1e-7);
        assert!(beta_t_alpha(1.0, 2.0, alpha - 1e-6).is_err());
        assert!(beta_t_alpha(0.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn local_betas_on_the_quarter_ball() {
        let (b, bt) = local_betas(2.0, 0.0, PI / 2.0, 1.0, 2.0).unwrap();
        assert!((b - 16.0).abs() < 1e-13 && (bt - 16.0).abs() < 1e-13);
        let (b, bt) = local_betas(2.0, 0.0, 1e8, 0.5, 3.0).unwrap();
        assert!(b < 1e-14 && bt < 1e-14);
    }
}
