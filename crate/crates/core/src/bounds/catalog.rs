use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::constants::{beta_eps_radius, beta_t_alpha, beta_tilde_radius, BETA_DOMAIN_FLOOR};
use super::phi::phi_bbg;
use crate::error::{invalid, Error, Result};
use crate::numeric::{csch_sq, x_coth};
use crate::quadrature::Quadrature;

/// Identifiers of the catalogued inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundId {
    #[serde(rename = "LY1")]
    Ly1,
    #[serde(rename = "LY3")]
    Ly3,
    #[serde(rename = "L-X-1")]
    LiXu,
    #[serde(rename = "Yau")]
    Yau,
    #[serde(rename = "BQ6")]
    Bq6,
    #[serde(rename = "BBG")]
    Bbg,
    #[serde(rename = "J2")]
    J2,
    #[serde(rename = "A2")]
    A2,
    #[serde(rename = "A2'")]
    A2Prime,
    #[serde(rename = "NE")]
    Ne,
    #[serde(rename = "A2B")]
    A2b,
    #[serde(rename = "A2BB")]
    A2bb,
    #[serde(rename = "G3")]
    G3,
    #[serde(rename = "D4")]
    D4,
}

impl BoundId {
    pub const ALL: [BoundId; 14] = [
        BoundId::Ly1,
        BoundId::Ly3,
        BoundId::LiXu,
        BoundId::Yau,
        BoundId::Bq6,
        BoundId::Bbg,
        BoundId::J2,
        BoundId::A2,
        BoundId::A2Prime,
        BoundId::Ne,
        BoundId::A2b,
        BoundId::A2bb,
        BoundId::G3,
        BoundId::D4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::Ly1 => "LY1",
            BoundId::Ly3 => "LY3",
            BoundId::LiXu => "L-X-1",
            BoundId::Yau => "Yau",
            BoundId::Bq6 => "BQ6",
            BoundId::Bbg => "BBG",
            BoundId::J2 => "J2",
            BoundId::A2 => "A2",
            BoundId::A2Prime => "A2'",
            BoundId::Ne => "NE",
            BoundId::A2b => "A2B",
            BoundId::A2bb => "A2BB",
            BoundId::G3 => "G3",
            BoundId::D4 => "D4",
        }
    }

    /// Bounds formulated for the unweighted Laplacian only.
    pub fn requires_zero_drift(self) -> bool {
        matches!(self, BoundId::Ly1 | BoundId::Ly3 | BoundId::LiXu | BoundId::Yau | BoundId::Bq6)
    }

    /// Bounds whose right side depends on the point through `X`, `Y` or `W`.
    pub fn is_implicit(self) -> bool {
        matches!(self, BoundId::Yau | BoundId::Bq6 | BoundId::Bbg)
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "bound", name: s.to_string() })
    }
}

/// Parameters of a bound evaluation. Only those a bound needs are read.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub t: f64,
    #[serde(rename = "K_prime", default, skip_serializing_if = "Option::is_none")]
    pub k_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(rename = "K_region", default, skip_serializing_if = "Option::is_none")]
    pub k_region: Option<f64>,
    /// `Lu/u` at the evaluation point (BBG).
    #[serde(rename = "Y", default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    /// `|∇u|²/u²` at the evaluation point (BQ6).
    #[serde(rename = "X", default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    /// `|∇u|²/u` at the evaluation point (Yau).
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
}

impl BoundParams {
    pub fn new(n: f64, k: f64, t: f64) -> Self {
        Self { n, k, t, ..Self::default() }
    }
    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }
    pub fn eps(mut self, eps: f64) -> Self {
        self.eps = Some(eps);
        self
    }
    pub fn k_prime(mut self, k_prime: f64) -> Self {
        self.k_prime = Some(k_prime);
        self
    }
    pub fn ball(mut self, radius: f64, k_region: f64) -> Self {
        self.radius = Some(radius);
        self.k_region = Some(k_region);
        self
    }
    /// Supplies the point values `X`, `Y`, `W`.
    pub fn at(mut self, x: f64, y: f64, w: f64) -> Self {
        self.x = Some(x);
        self.y = Some(y);
        self.w = Some(w);
        self
    }

    fn k_minus(&self) -> f64 {
        (-self.k).max(0.0)
    }
}

/// The normal form `γ·X ≤ a·Y + c`, asserted when `domain_ok`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundForm {
    pub bound_id: BoundId,
    pub params: BoundParams,
    pub gamma: f64,
    pub a: f64,
    pub c: f64,
    pub domain_ok: bool,
    #[serde(default)]
    pub note: String,
}

impl BoundForm {
    fn holds(id: BoundId, params: &BoundParams, gamma: f64, a: f64, c: f64) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("a", a), ("c", c)] {
            if !v.is_finite() {
                return Err(invalid(name, format!("{id} evaluates to {v} for {params:?}")));
            }
        }
        Ok(Self { bound_id: id, params: *params, gamma, a, c, domain_ok: true, note: String::new() })
    }

    fn outside(id: BoundId, params: &BoundParams, note: impl Into<String>) -> Self {
        Self { bound_id: id, params: *params, gamma: 0.0, a: 0.0, c: 0.0, domain_ok: false, note: note.into() }
    }

    /// `a·Y + c − γ·X`; non-negative iff the inequality holds.
    pub fn margin(&self, x: f64, y: f64) -> Margin {
        if self.domain_ok {
            Margin::Value(self.a * y + self.c - self.gamma * x)
        } else {
            Margin::OutOfDomain(self.note.clone())
        }
    }
}

/// Outcome of [`check_inequality`].
#[derive(Debug, Clone, PartialEq)]
pub enum Margin {
    Value(f64),
    OutOfDomain(String),
}

impl Margin {
    pub fn value(&self) -> Option<f64> {
        match self {
            Margin::Value(v) => Some(*v),
            Margin::OutOfDomain(_) => None,
        }
    }
}

/// Default pass threshold `tol_rel·(1 + |c|)`.
pub fn tolerance(tol_rel: f64, c: f64) -> f64 {
    tol_rel * (1.0 + c.abs())
}

fn need(value: Option<f64>, name: &'static str, id: BoundId) -> Result<f64> {
    match value {
        Some(v) if v.is_finite() => Ok(v),
        Some(v) => Err(invalid(name, format!("{id} got non-finite {v}"))),
        None => Err(invalid(name, format!("{id} needs `{name}`"))),
    }
}

/// Evaluates a catalogued bound in normal form.
///
/// Bounds on `Y` alone (J2) carry `γ = 0` and `a = ±1`. Parameter values
/// outside a bound's hypotheses give `domain_ok = false` with a note.
pub fn eval_bound(id: BoundId, p: &BoundParams) -> Result<BoundForm> {
    let (n, k, t) = (p.n, p.k, p.t);
    if !(n.is_finite() && n > 0.0) {
        return Err(invalid("n", format!("must be positive, got {n}")));
    }
    if !k.is_finite() {
        return Err(invalid("K", "must be finite"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let km = p.k_minus();
    let out = |note: String| Ok(BoundForm::outside(id, p, note));
    match id {
        BoundId::Ly1 => {
            let alpha = need(p.alpha, "alpha", id)?;
            if alpha <= 1.0 {
                return out(format!("needs alpha > 1, got {alpha}"));
            }
            let c = n * km * alpha * alpha / (4.0 * (alpha - 1.0)) + n * alpha * alpha / (2.0 * t);
            BoundForm::holds(id, p, 1.0, alpha, c)
        }
        BoundId::Ly3 => {
            let a = 1.0 + 2.0 / 3.0 * km * t;
            let c = n / (2.0 * t) + n * km / 2.0 * (1.0 + km * t / 3.0);
            BoundForm::holds(id, p, 1.0, a, c)
        }
        BoundId::LiXu => {
            let x = km * t;
            // [sinh x cosh x − x]/sinh² x = coth x − x·csch² x.
            let extra = if x < 1e-3 { 2.0 * x / 3.0 - 4.0 * x * x * x / 45.0 } else { 1.0 / x.tanh() - x * csch_sq(x) };
            // (K⁻/2)(1 + coth K⁻t) = (K⁻ + x·coth(x)/t)/2.
            let c = n / 2.0 * (km + x_coth(x) / t);
            BoundForm::holds(id, p, 1.0, 1.0 + extra, c)
        }
        BoundId::Yau => {
            let w = need(p.w, "W", id)?;
            if w < 0.0 {
                return Err(invalid("W", format!("must be >= 0, got {w}")));
            }
            let c = (2.0 * n * km).sqrt() * (w + n / (2.0 * t) + 2.0 * n * km).sqrt() + n / (2.0 * t);
            BoundForm::holds(id, p, 1.0, 1.0, c)
        }
        BoundId::Bq6 => {
            let x = need(p.x, "X", id)?;
            if x < 0.0 {
                return Err(invalid("X", format!("must be >= 0, got {x}")));
            }
            let c = (n * km).sqrt() * (x + n / (2.0 * t) + n * km / 4.0).sqrt() + n / (2.0 * t);
            BoundForm::holds(id, p, 1.0, 1.0, c)
        }
        BoundId::Bbg => {
            if k <= 0.0 {
                return out(format!("needs K > 0, got {k}"));
            }
            let y = need(p.y, "Y", id)?;
            let lhs = 4.0 / (n * k) * y;
            let rhs = 1.0 + PI * PI / (k * k * t * t);
            if !(lhs < rhs) {
                return out(format!("4Y/(nK) = {lhs} is not below 1 + pi^2/(K^2 t^2) = {rhs}"));
            }
            let lambda = 1.0 - lhs;
            match phi_bbg(k, t, lambda) {
                Ok(phi) => BoundForm::holds(id, p, 1.0, 1.0, -n * k / 2.0 + n / 2.0 * phi),
                Err(Error::OutOfDomain(note)) => out(note),
                Err(e) => Err(e),
            }
        }
        BoundId::J2 => {
            if k > 0.0 {
                let s = (k * t).min(PI);
                BoundForm::holds(id, p, 0.0, -1.0, n / (4.0 * t) * (s + PI * PI / s))
            } else {
                let s = PI.max(-k * t);
                BoundForm::holds(id, p, 0.0, 1.0, n / (4.0 * t) * (s + PI * PI / s))
            }
        }
        BoundId::A2 => {
            let alpha = need(p.alpha, "alpha", id)?;
            if k == 0.0 {
                return out("needs K != 0".to_string());
            }
            let ratio = (1.0 + alpha) / (k * t);
            if ratio < BETA_DOMAIN_FLOOR {
                return out(format!("(1+alpha)/(Kt) = {ratio} is below (9pi^2-64)/(9pi^2) = {BETA_DOMAIN_FLOOR}"));
            }
            let beta = beta_t_alpha(k, t, alpha)?;
            let c = n / 2.0
                * (k * (alpha - 1.0) / 2.0 + (1.0 + alpha) * PI * PI / (2.0 * k * t * t)
                    - 2.0 * PI * beta / t
                    - 3.0 * PI * PI / (8.0 * t));
            BoundForm::holds(id, p, 1.0, alpha, c)
        }
        BoundId::A2Prime => {
            if k <= 0.0 {
                return out(format!("needs K > 0, got {k}"));
            }
            let kp = p.k_prime.unwrap_or(k);
            if !(kp >= k) {
                return out(format!("needs K' >= K, got K' = {kp}"));
            }
            let s = (k * t).min(1.0);
            let c = n / 2.0
                * (PI * PI * k / (2.0 * s * s) - k / 2.0 - 3.0 * k * PI * PI / (8.0 * s))
                * (-2.0 * kp * (t - 1.0 / k).max(0.0)).exp();
            BoundForm::holds(id, p, 1.0, 0.0, c)
        }
        BoundId::Ne => {
            let alpha = need(p.alpha, "alpha", id)?;
            if alpha <= 1.0 {
                return out(format!("needs alpha > 1, got {alpha}"));
            }
            let q = k / (alpha - 1.0);
            let gamma = 1.0 + 2.0 * k / alpha * ne_ratio_integral(q, t)?;
            let c = n * alpha / (2.0 * t) * x_coth(k * t / (2.0 * (alpha - 1.0)));
            BoundForm::holds(id, p, gamma, 1.0, c)
        }
        BoundId::A2b => {
            let alpha = need(p.alpha, "alpha", id)?;
            if alpha < 1.0 + km * t {
                return out(format!("needs alpha >= 1 + K^- t = {}, got {alpha}", 1.0 + km * t));
            }
            BoundForm::holds(id, p, 1.0 + 2.0 * k * t / (3.0 * alpha), 1.0, n * alpha / (2.0 * t))
        }
        BoundId::A2bb => {
            if k <= 0.0 {
                return out(format!("needs K > 0, got {k}"));
            }
            BoundForm::holds(id, p, 1.0 + 2.0 * k * t / 3.0, 1.0, n / (2.0 * t))
        }
        BoundId::G3 => {
            let eps = need(p.eps, "eps", id)?;
            let radius = need(p.radius, "R", id)?;
            let kd = need(p.k_region, "K_region", id)?;
            if !(eps > 0.0 && eps < 1.0) {
                return out(format!("needs eps in (0, 1), got {eps}"));
            }
            let beta = beta_eps_radius(n, kd, radius, eps)?;
            let denom = -(-beta * t).exp_m1();
            let c = n * (1.0 + eps).powi(2) * beta / (2.0 * denom);
            let integral = Quadrature::with_tol(1e-13, 1e-13).integrate(
                |s| ((-2.0 * beta * s).exp() - (-beta * (s + t)).exp()) * (2.0 * kd * s).exp(),
                0.0,
                t,
            )?;
            let a = 2.0 * (1.0 + eps) * beta * integral.value / (denom * denom);
            BoundForm::holds(id, p, 1.0, a, c)
        }
        BoundId::D4 => {
            let alpha = need(p.alpha, "alpha", id)?;
            let radius = need(p.radius, "R", id)?;
            let kd = need(p.k_region, "K_region", id)?;
            if alpha <= 1.0 {
                return out(format!("needs alpha > 1, got {alpha}"));
            }
            let beta = beta_tilde_radius(n, kd, radius, alpha)?;
            let c = n * alpha * alpha / 2.0 * (kd / (alpha - 1.0) + beta / -(-beta * t).exp_m1());
            BoundForm::holds(id, p, 1.0, alpha, c)
        }
    }
}

/// `∫₀ᵗ (1−e^{−qs})² ds / (1−e^{−qt})²`, written with `expm1` ratios so the
/// `q → 0` limit `t/3` needs no special casing.
pub(crate) fn ne_ratio_integral(q: f64, t: f64) -> Result<f64> {
    if q == 0.0 {
        return Ok(t / 3.0);
    }
    let denom = (-q * t).exp_m1();
    let r = Quadrature::with_tol(1e-13, 1e-13).integrate(
        |s| {
            let v = (-q * s).exp_m1() / denom;
            v * v
        },
        0.0,
        t,
    )?;
    Ok(r.value)
}

/// Margin of `bound_id` at the point `(X, Y)`.
///
/// Yau's bound reads `W` from `params`; the point values are written into the
/// parameters before evaluation.
pub fn check_inequality(id: BoundId, params: &BoundParams, x: f64, y: f64) -> Result<Margin> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid("X", format!("must be finite and >= 0, got {x}")));
    }
    if !y.is_finite() {
        return Err(invalid("Y", "must be finite"));
    }
    let mut p = *params;
    p.x = Some(x);
    p.y = Some(y);
    let form = eval_bound(id, &p)?;
    Ok(form.margin(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(id: BoundId, p: BoundParams) -> BoundForm {
        eval_bound(id, &p).unwrap()
    }

    #[test]
    fn ly1_flat() {
        let f = form(BoundId::Ly1, BoundParams::new(2.0, 0.0, 1.0).alpha(2.0));
        assert_eq!((f.gamma, f.a, f.c), (1.0, 2.0, 4.0));
    }

    #[test]
    fn j2_upper_at_saturation() {
        let f = form(BoundId::J2, BoundParams::new(2.0, 1.0, PI));
        assert_eq!((f.gamma, f.a), (0.0, -1.0));
        assert!((f.c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn a2b_flat_alpha_one() {
        let f = form(BoundId::A2b, BoundParams::new(1.0, 0.0, 0.5).alpha(1.0));
        assert_eq!((f.gamma, f.a, f.c), (1.0, 1.0, 1.0));
        // Gaussian at t = 0.5: X − Y = 1/(2t) = 1.
        let m = check_inequality(BoundId::A2b, &BoundParams::new(1.0, 0.0, 0.5).alpha(1.0), 3.0, 2.0).unwrap();
        assert!(m.value().unwrap().abs() < 1e-12);
    }

    #[test]
    fn ne_flat_limit() {
        let f = form(BoundId::Ne, BoundParams::new(2.0, 0.0, 1.0).alpha(2.0));
        assert_eq!((f.gamma, f.a, f.c), (1.0, 1.0, 2.0));
        let g = form(BoundId::Ne, BoundParams::new(2.0, 1e-9, 1.0).alpha(2.0));
        assert!((g.gamma - 1.0).abs() < 1e-8 && (g.c - 2.0).abs() < 1e-8);
    }

    #[test]
    fn constant_state_margin_equals_c() {
        let p = BoundParams::new(2.0, -1.0, 0.7).alpha(2.0).at(0.0, 0.0, 0.0);
        for id in [BoundId::Ly1, BoundId::Ly3, BoundId::LiXu, BoundId::Ne, BoundId::Yau, BoundId::Bq6] {
            let f = form(id, p);
            assert_eq!(check_inequality(id, &p, 0.0, 0.0).unwrap(), Margin::Value(f.c));
            assert!(f.c >= 0.0);
        }
    }

    #[test]
    fn bq6_without_negative_curvature() {
        let p = BoundParams::new(3.0, 0.0, 0.25);
        let m = check_inequality(BoundId::Bq6, &p, 1.5, -0.5).unwrap().value().unwrap();
        assert!((m - (-0.5 + 6.0 - 1.5)).abs() < 1e-14);
    }

    #[test]
    fn li_xu_is_continuous_across_the_series_switch() {
        for t in [0.999e-3, 1.001e-3] {
            let f = form(BoundId::LiXu, BoundParams::new(2.0, -1.0, t));
            let x: f64 = t;
            let direct = (x.sinh() * x.cosh() - x) / x.sinh().powi(2);
            assert!((f.a - 1.0 - direct).abs() < 1e-12);
        }
        let flat = form(BoundId::LiXu, BoundParams::new(2.0, 0.0, 2.0));
        assert_eq!((flat.a, flat.c), (1.0, 0.5));
    }

    #[test]
    fn domain_violations_are_flagged_not_raised() {
        let p = BoundParams::new(2.0, -1.0, 1.0).alpha(1.5);
        for id in [BoundId::Bbg, BoundId::A2, BoundId::A2Prime, BoundId::A2b, BoundId::A2bb] {
            let mut q = p;
            q.y = Some(0.0);
            let f = form(id, q);
            assert!(!f.domain_ok, "{id}");
            assert!(!f.note.is_empty());
        }
        assert!(matches!(check_inequality(BoundId::A2bb, &p, 0.0, 0.0).unwrap(), Margin::OutOfDomain(_)));
    }

    #[test]
    fn missing_parameters_are_errors() {
        assert!(eval_bound(BoundId::Ly1, &BoundParams::new(2.0, 0.0, 1.0)).is_err());
        assert!(eval_bound(BoundId::Yau, &BoundParams::new(2.0, 0.0, 1.0)).is_err());
        assert!(eval_bound(BoundId::Ly3, &BoundParams::new(2.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn bound_ids_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(id.as_str().parse::<BoundId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.as_str()));
        }
    }

    #[test]
    fn a2_prime_decays_after_one_over_k() {
        let p = BoundParams::new(2.0, 1.0, 1.0);
        let c1 = form(BoundId::A2Prime, p).c;
        let c2 = form(BoundId::A2Prime, BoundParams { t: 2.0, ..p }.k_prime(1.0)).c;
        assert!((c2 - c1 * (-2.0f64).exp()).abs() < 1e-14);
    }
}
