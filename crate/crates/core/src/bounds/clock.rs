use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::expm1_over;
use crate::quadrature::Quadrature;

/// Parametric families of deterministic test clocks `ℓ` on `[0, t]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ClockFamily {
    /// `(t − s)/t`.
    Linear,
    /// `e^{Ks}(cos(πs/2t) + a·sin(πs/t))`.
    Trig {
        a: f64,
        #[serde(rename = "K")]
        k: f64,
    },
    /// `∫₀^{t−s} e^{qr} dr / ∫₀ᵗ e^{qr} dr` with `q = K/(α−1)`.
    ExpIntegral {
        alpha: f64,
        #[serde(rename = "K")]
        k: f64,
    },
    /// `e^{−qs}(t − s)/t` with `q = K/(α−1)`.
    ExpLinear {
        alpha: f64,
        #[serde(rename = "K")]
        k: f64,
    },
    /// `h_s e^{Ks}` with `h` the sinh / linear / sine profile selected by `λ`.
    Bbg {
        lambda: f64,
        #[serde(rename = "K")]
        k: f64,
    },
    /// `(e^{−βs} − e^{−βt})/(1 − e^{−βt})`.
    LocalExp { beta: f64 },
}

/// A validated clock on `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clock {
    family: ClockFamily,
    horizon: f64,
}

/// Builds a clock and checks `ℓ(0) = 1`, `ℓ(t) = 0` to 1e-12.
pub fn make_clock(family: ClockFamily, t: f64) -> Result<Clock> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("horizon must be positive, got {t}")));
    }
    let alpha_ok = |alpha: f64, k: f64| -> Result<()> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(invalid("alpha", format!("must exceed 1, got {alpha}")));
        }
        if !k.is_finite() {
            return Err(invalid("K", "must be finite"));
        }
        Ok(())
    };
    match family {
        ClockFamily::Linear => {}
        ClockFamily::Trig { a, k } => {
            if !(a.is_finite() && k.is_finite()) {
                return Err(invalid("a", "trig parameters must be finite"));
            }
        }
        ClockFamily::ExpIntegral { alpha, k } | ClockFamily::ExpLinear { alpha, k } => alpha_ok(alpha, k)?,
        ClockFamily::Bbg { lambda, k } => {
            if !(lambda.is_finite() && k.is_finite() && k != 0.0) {
                return Err(invalid("lambda", "needs finite lambda and non-zero K"));
            }
            if lambda < 0.0 && k.abs() * t * (-lambda).sqrt() >= PI {
                return Err(Error::OutOfDomain(format!(
                    "lambda = {lambda} <= -pi^2/(K^2 t^2) = {}",
                    -PI * PI / (k * k * t * t)
                )));
            }
        }
        ClockFamily::LocalExp { beta } => {
            if !(beta.is_finite() && beta >= 0.0) {
                return Err(invalid("beta", format!("must be >= 0, got {beta}")));
            }
        }
    }
    let clock = Clock { family, horizon: t };
    let (start, end) = (clock.value(0.0), clock.value(t));
    if (start - 1.0).abs() > 1e-12 || end.abs() > 1e-12 {
        return Err(Error::OutOfDomain(format!("clock endpoints l(0) = {start}, l(t) = {end} for {family:?}")));
    }
    Ok(clock)
}

impl Clock {
    pub fn family(&self) -> ClockFamily {
        self.family
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `ℓ(s)`.
    pub fn value(&self, s: f64) -> f64 {
        self.eval(s).0
    }

    /// `ℓ′(s)`.
    pub fn derivative(&self, s: f64) -> f64 {
        self.eval(s).1
    }

    /// `(ℓ(s), ℓ′(s))`.
    pub fn eval(&self, s: f64) -> (f64, f64) {
        let t = self.horizon;
        match self.family {
            ClockFamily::Linear => ((t - s) / t, -1.0 / t),
            ClockFamily::Trig { a, k } => {
                let e = (k * s).exp();
                let (w1, w2) = (PI / (2.0 * t), PI / t);
                let g = (w1 * s).cos() + a * (w2 * s).sin();
                let dg = -w1 * (w1 * s).sin() + a * w2 * (w2 * s).cos();
                (e * g, e * (k * g + dg))
            }
            ClockFamily::ExpIntegral { alpha, k } => {
                let q = k / (alpha - 1.0);
                // ∫₀^x e^{qr} dr = x·expm1(qx)/(qx).
                let total = t * expm1_over(q * t);
                let rem = t - s;
                (rem * expm1_over(q * rem) / total, -(q * rem).exp() / total)
            }
            ClockFamily::ExpLinear { alpha, k } => {
                let q = k / (alpha - 1.0);
                let e = (-q * s).exp();
                let v = e * (t - s) / t;
                (v, -q * v - e / t)
            }
            ClockFamily::Bbg { lambda, k } => {
                let (h, dh) = bbg_profile(lambda, k, t, s);
                let e = (k * s).exp();
                (h * e, (dh + k * h) * e)
            }
            ClockFamily::LocalExp { beta } => {
                if beta == 0.0 {
                    return ((t - s) / t, -1.0 / t);
                }
                let denom = -(-beta * t).exp_m1();
                (((-beta * s).exp_m1() - (-beta * t).exp_m1()) / denom, -beta * (-beta * s).exp() / denom)
            }
        }
    }

    /// True when `ℓ′ ≤ 0` on a 1001-point grid of `[0, t]`.
    pub fn is_nonincreasing(&self) -> bool {
        (0..=1000).all(|i| self.derivative(self.horizon * i as f64 / 1000.0) <= 1e-12)
    }
}

fn bbg_profile(lambda: f64, k: f64, t: f64, s: f64) -> (f64, f64) {
    if lambda > 0.0 {
        let mu = k.abs() * lambda.sqrt();
        // sinh(μ(t−s))/sinh(μt) = e^{−μs}(1 − e^{−2μ(t−s)})/(1 − e^{−2μt}).
        let denom = -(-2.0 * mu * t).exp_m1();
        let e = (-mu * s).exp();
        let num = -(-2.0 * mu * (t - s)).exp_m1();
        let h = e * num / denom;
        // −μ cosh(μ(t−s))/sinh(μt).
        let dh = -mu * e * (1.0 + (-2.0 * mu * (t - s)).exp()) / denom;
        (h, dh)
    } else if lambda == 0.0 {
        ((t - s) / t, -1.0 / t)
    } else {
        let nu = k.abs() * (-lambda).sqrt();
        let d = (nu * t).sin();
        ((nu * (t - s)).sin() / d, -nu * (nu * (t - s)).cos() / d)
    }
}

/// Weighted clock integrals over `[0, t]` with weight `e^{−2Ks}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockIntegrals {
    /// `∫ ℓ′² e^{−2Ks} ds`.
    pub derivsq: f64,
    /// `∫ (ℓ²)′ e^{−2Ks} ds`.
    pub sqprime: f64,
    /// `∫ ℓ² e^{−2Ks} ds`.
    pub sq: f64,
    /// Closed-form values `(derivsq, sqprime, sq)` when the family has them.
    pub closed_form: Option<(f64, f64, f64)>,
}

fn clock_quadrature() -> Quadrature {
    Quadrature::with_tol(1e-12, 1e-13)
}

/// Computes [`ClockIntegrals`] by adaptive quadrature and, where available,
/// by closed form; the two must agree to 1e-9.
pub fn clock_integrals(clock: &Clock, k: f64, t: f64) -> Result<ClockIntegrals> {
    if !k.is_finite() {
        return Err(invalid("K", "must be finite"));
    }
    if (t - clock.horizon).abs() > 1e-12 * t.max(1.0) {
        return Err(invalid("t", format!("{t} differs from the clock horizon {}", clock.horizon)));
    }
    let q = clock_quadrature();
    let derivsq = q
        .integrate(
            |s| {
                let d = clock.derivative(s);
                d * d * (-2.0 * k * s).exp()
            },
            0.0,
            t,
        )?
        .value;
    let sqprime = q
        .integrate(
            |s| {
                let (l, d) = clock.eval(s);
                2.0 * l * d * (-2.0 * k * s).exp()
            },
            0.0,
            t,
        )?
        .value;
    let sq = q
        .integrate(
            |s| {
                let l = clock.value(s);
                l * l * (-2.0 * k * s).exp()
            },
            0.0,
            t,
        )?
        .value;
    let closed_form = match clock.family {
        ClockFamily::Trig { a, k: kc } if kc == k => {
            let sq = t * (1.0 + a * a) / 2.0 + 8.0 * t * a / (3.0 * PI);
            let two_k_sq = 2.0 * k * sq;
            let derivsq =
                k / 2.0 * two_k_sq - k + PI * PI * a * a / (2.0 * t) + PI * PI / (8.0 * t) + 2.0 * PI * a / (3.0 * t);
            Some((derivsq, two_k_sq - 1.0, sq))
        }
        ClockFamily::Linear if k == 0.0 => Some((1.0 / t, -1.0, t / 3.0)),
        _ => None,
    };
    if let Some((d, p, s)) = closed_form {
        for (quad, exact) in [(derivsq, d), (sqprime, p), (sq, s)] {
            if (quad - exact).abs() > 1e-9 {
                return Err(Error::Quadrature { error: (quad - exact).abs(), evaluations: 0 });
            }
        }
    }
    Ok(ClockIntegrals { derivsq, sqprime, sq, closed_form })
}

/// `γ_{t,α} = 2K₀∫₀ᵗ ℓ² e^{2αK₀s/(α−1)} ds`.
pub fn gamma_t_alpha(clock: &Clock, alpha: f64, k0: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid("alpha", format!("must exceed 1, got {alpha}")));
    }
    let rate = 2.0 * alpha * k0 / (alpha - 1.0);
    let r = clock_quadrature().integrate(
        |s| {
            let l = clock.value(s);
            l * l * (rate * s).exp()
        },
        0.0,
        clock.horizon,
    )?;
    Ok(2.0 * k0 * r.value)
}

/// `∫₀ᵗ (Kℓ/(α−1) + ℓ′)² e^{2Ks/(α−1)} ds`, the deterministic factor of the
/// dimension-free right side.
pub fn drift_square_integral(clock: &Clock, k: f64, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 1.0) {
        return Err(invalid("alpha", format!("must exceed 1, got {alpha}")));
    }
    let q = k / (alpha - 1.0);
    let r = clock_quadrature().integrate(
        |s| {
            let (l, d) = clock.eval(s);
            let v = q * l + d;
            v * v * (2.0 * q * s).exp()
        },
        0.0,
        clock.horizon,
    )?;
    Ok(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_clock_values() {
        let c = make_clock(ClockFamily::Linear, 2.0).unwrap();
        assert_eq!(c.eval(1.0), (0.5, -0.5));
        let i = clock_integrals(&c, 0.0, 2.0).unwrap();
        assert!((i.derivsq - 0.5).abs() < 1e-14 && (i.sqprime + 1.0).abs() < 1e-14);
    }

    #[test]
    fn trig_closed_form_matches_quadrature() {
        let c = make_clock(ClockFamily::Trig { a: 0.0, k: 1.0 }, 1.0).unwrap();
        let i = clock_integrals(&c, 1.0, 1.0).unwrap();
        assert!((2.0 * i.sq - 1.0).abs() < 1e-12);
        for &(a, k, t) in &[(0.7, -0.5, 0.3), (-1.3, 2.0, 1.7), (3.0, 0.25, 4.0)] {
            let c = make_clock(ClockFamily::Trig { a, k }, t).unwrap();
            let i = clock_integrals(&c, k, t).unwrap();
            let (d, p, s) = i.closed_form.unwrap();
            assert!((i.derivsq - d).abs() < 1e-9 && (i.sqprime - p).abs() < 1e-9);
            assert!((i.sq - s).abs() < 1e-9);
        }
    }

    #[test]
    fn bbg_flat_profile_is_linear() {
        let c = make_clock(ClockFamily::Bbg { lambda: 0.0, k: 1.0 }, 2.0).unwrap();
        for s in [0.0, 0.5, 1.3] {
            let (l, _) = c.eval(s);
            assert!((l - (2.0 - s) / 2.0 * s.exp()).abs() < 1e-15);
        }
        assert!(make_clock(ClockFamily::Bbg { lambda: -3.0, k: 1.0 }, 2.0).is_err());
    }

    #[test]
    fn bbg_profiles_match_direct_formulas() {
        let (t, k) = (1.5, 0.8);
        let c = make_clock(ClockFamily::Bbg { lambda: 2.0, k }, t).unwrap();
        let mu = k * 2f64.sqrt();
        let s = 0.4;
        let h = (mu * (t - s)).sinh() / (mu * t).sinh();
        assert!((c.value(s) - h * (k * s).exp()).abs() < 1e-14);
        let c = make_clock(ClockFamily::Bbg { lambda: -1.0, k }, t).unwrap();
        let h = (k * (t - s)).sin() / (k * t).sin();
        assert!((c.value(s) - h * (k * s).exp()).abs() < 1e-14);
    }

    #[test]
    fn local_exp_small_rate_tends_to_linear() {
        let c = make_clock(ClockFamily::LocalExp { beta: 1e-9 }, 2.0).unwrap();
        assert!((c.value(0.5) - 0.75).abs() < 1e-8);
        let c = make_clock(ClockFamily::LocalExp { beta: 0.0 }, 2.0).unwrap();
        assert_eq!(c.value(0.5), 0.75);
    }

    #[test]
    fn exp_linear_identity() {
        for &(alpha, k, t) in &[(2.0, 1.0, 1.0), (1.5, -2.0, 0.4), (3.0, 0.0, 2.0)] {
            let c = make_clock(ClockFamily::ExpLinear { alpha, k }, t).unwrap();
            let v = drift_square_integral(&c, k, alpha).unwrap();
            assert!((v - 1.0 / t).abs() < 1e-10);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let families = [
            ClockFamily::Linear,
            ClockFamily::Trig { a: 0.4, k: -0.7 },
            ClockFamily::ExpIntegral { alpha: 2.5, k: 1.3 },
            ClockFamily::ExpLinear { alpha: 1.5, k: -0.4 },
            ClockFamily::Bbg { lambda: 0.6, k: 1.1 },
            ClockFamily::Bbg { lambda: -0.6, k: 1.1 },
            ClockFamily::LocalExp { beta: 3.0 },
        ];
        let h = 1e-6;
        for fam in families {
            let c = make_clock(fam, 1.2).unwrap();
            for s in [0.1, 0.6, 1.0] {
                let fd = (c.value(s + h) - c.value(s - h)) / (2.0 * h);
                assert!((fd - c.derivative(s)).abs() < 1e-7, "{fam:?} at {s}");
            }
        }
    }

    #[test]
    fn horizon_mismatch_is_rejected() {
        let c = make_clock(ClockFamily::Linear, 1.0).unwrap();
        assert!(clock_integrals(&c, 0.0, 2.0).is_err());
        assert!(make_clock(ClockFamily::ExpIntegral { alpha: 1.0, k: 1.0 }, 1.0).is_err());
    }
}
