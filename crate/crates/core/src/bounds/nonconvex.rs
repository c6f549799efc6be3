use serde::{Deserialize, Serialize};

use super::clock::Clock;
use crate::error::{invalid, Error, Result};
use crate::quadrature::Quadrature;

/// Inputs of the non-convex boundary construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonconvexInputs {
    /// Upper bound on the sectional curvature near the boundary.
    pub k: f64,
    /// Upper bound on the second fundamental form.
    pub theta: f64,
    /// Lower bound on the second fundamental form, negative.
    pub sigma: f64,
    /// Width of the collar around the boundary.
    pub r0: f64,
    pub d: u32,
    pub zrho_norm: f64,
    /// Curvature-dimension lower bound `K`.
    #[serde(rename = "K")]
    pub curvature: f64,
    pub n: f64,
}

/// Constants of the conformal change used for non-convex boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonconvexData {
    pub inputs: NonconvexInputs,
    pub delta: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub k_phi: f64,
}

fn quad() -> Quadrature {
    Quadrature::with_tol(1e-13, 1e-13)
}

impl NonconvexInputs {
    /// `cos(√k s) − (θ/√k) sin(√k s)`, or `1 − θs` when `k = 0`.
    pub fn h(&self, s: f64) -> f64 {
        if self.k == 0.0 {
            1.0 - self.theta * s
        } else {
            let rk = self.k.sqrt();
            (rk * s).cos() - self.theta / rk * (rk * s).sin()
        }
    }
}

impl NonconvexData {
    pub fn h(&self, s: f64) -> f64 {
        self.inputs.h(s)
    }

    /// `−2κ²(δ − σ‖Zρ‖ + K⁻)/(α − κ²)`, defined for `α > κ²`.
    pub fn k_alpha_phi(&self, alpha: f64) -> Result<f64> {
        let k2 = self.kappa * self.kappa;
        if !(alpha.is_finite() && alpha > k2) {
            return Err(invalid("alpha", format!("must exceed kappa^2 = {k2}, got {alpha}")));
        }
        let i = &self.inputs;
        let km = (-i.curvature).max(0.0);
        Ok(-2.0 * k2 * (self.delta - i.sigma * i.zrho_norm + km) / (alpha - k2))
    }
}

/// Computes `δ`, `κ`, `γ` and `K_φ`.
///
/// `κ` is the double integral `1 + δ∫₀^{r₀} g(s)^{1−d} ∫_s^{r₀} g(r)^{d−1} dr ds`
/// with `g(s) = h_s − h_{r₀}`.
pub fn nonconvex_constants(inputs: NonconvexInputs) -> Result<NonconvexData> {
    let NonconvexInputs { k, theta, sigma, r0, d, zrho_norm, curvature, n } = inputs;
    if !(k.is_finite() && k >= 0.0) {
        return Err(invalid("k", format!("must be >= 0, got {k}")));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(invalid("theta", format!("must be >= 0, got {theta}")));
    }
    if !(sigma.is_finite() && sigma < 0.0) {
        return Err(invalid("sigma", format!("must be negative (non-convex boundary), got {sigma}")));
    }
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(invalid("r0", format!("must be positive, got {r0}")));
    }
    if d == 0 {
        return Err(invalid("d", "must be at least 1"));
    }
    if !(zrho_norm.is_finite() && zrho_norm >= 0.0) {
        return Err(invalid("zrho_norm", format!("must be >= 0, got {zrho_norm}")));
    }
    if !(curvature.is_finite() && n.is_finite() && n > 0.0) {
        return Err(invalid("K", "curvature and n must be finite, n > 0"));
    }
    let h_r0 = inputs.h(r0);
    let g = |s: f64| inputs.h(s) - h_r0;
    let degenerate = (0..1000).map(|i| r0 * i as f64 / 1000.0).any(|s| !(g(s) > 0.0));
    if degenerate {
        return Err(Error::OutOfDomain("h_s - h_r0 vanishes inside [0, r0); the collar is degenerate".to_string()));
    }
    let p = d as i32 - 1;
    let top = (1.0 - h_r0).powi(p);
    let mass = quad().integrate(|s| g(s).powi(p), 0.0, r0)?.value;
    let delta = -sigma * top / mass;
    let inner = |s: f64| -> Result<f64> { Ok(quad().integrate(|r| g(r).powi(p), s, r0)?.value) };
    let mut failure = None;
    let outer = quad().integrate(
        |s| match inner(s) {
            Ok(v) => v / g(s).powi(p),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        r0,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let kappa = 1.0 + delta * outer.value;
    let gamma = delta * mass / top;
    let k_phi = -2.0 * (curvature - delta + sigma * zrho_norm);
    Ok(NonconvexData { inputs, delta, kappa, gamma, k_phi })
}

/// The two non-convex inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonconvexMode {
    /// `φ²X/κ² ≤ a·Y + c`.
    #[serde(rename = "A1''")]
    Dimensional,
    /// `(1 + γ_{t,α,φ})φ²X − α·Y ≤ c`.
    #[serde(rename = "A100'")]
    DimensionFree,
}

/// Coefficients `lhs·φ²X ≤ a·Y + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonconvexForm {
    pub mode: NonconvexMode,
    pub lhs_coeff: f64,
    pub a: f64,
    pub c: f64,
    /// `γ_{t,α,φ}` in the dimension-free mode.
    pub gamma_t_alpha_phi: Option<f64>,
}

/// Right-hand side coefficients of the non-convex inequalities for `clock`.
pub fn nonconvex_bound_rhs(
    data: &NonconvexData,
    clock: &Clock,
    eps: f64,
    alpha: Option<f64>,
    mode: NonconvexMode,
) -> Result<NonconvexForm> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(invalid("eps", format!("must be positive, got {eps}")));
    }
    let t = clock.horizon();
    let n = data.inputs.n;
    let k2 = data.kappa * data.kappa;
    let q = quad();
    match mode {
        NonconvexMode::Dimensional => {
            let rate = eps - data.k_phi;
            let a = 2.0
                * q.integrate(
                    |s| {
                        let (l, dl) = clock.eval(s);
                        l * dl.abs() * (rate * s).exp()
                    },
                    0.0,
                    t,
                )?
                .value;
            let i = q
                .integrate(
                    |s| {
                        let dl = clock.derivative(s);
                        dl * dl * (rate * s).exp()
                    },
                    0.0,
                    t,
                )?
                .value;
            let c = (n / 2.0 + data.gamma * data.gamma / eps) * i;
            Ok(NonconvexForm { mode, lhs_coeff: 1.0 / k2, a, c, gamma_t_alpha_phi: None })
        }
        NonconvexMode::DimensionFree => {
            let alpha = alpha.ok_or_else(|| invalid("alpha", "A100' needs alpha"))?;
            let kap = data.k_alpha_phi(alpha)?;
            let rate = kap + data.k_phi - eps;
            let g = 2.0
                * (alpha / k2 - 1.0)
                * q.integrate(
                    |s| {
                        let (l, dl) = clock.eval(s);
                        (l * dl).abs() * (rate * s).exp()
                    },
                    0.0,
                    t,
                )?
                .value;
            let shift = kap - eps;
            let i = q
                .integrate(
                    |s| {
                        let (l, dl) = clock.eval(s);
                        let v = shift * l + 2.0 * dl;
                        (shift * s).exp() * v * v
                    },
                    0.0,
                    t,
                )?
                .value;
            let coeff = n * alpha * alpha / 8.0 + alpha * alpha * data.gamma * data.gamma / (4.0 * eps * (alpha - k2));
            Ok(NonconvexForm { mode, lhs_coeff: 1.0 + g, a: alpha, c: i * coeff, gamma_t_alpha_phi: Some(g) })
        }
    }
}
