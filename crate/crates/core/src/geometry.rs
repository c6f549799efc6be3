//! Model manifolds reduced to one coordinate, with their curvature-dimension
//! constants and a finite-difference check of the curvature-dimension
//! inequality.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{coth, x_coth};

/// Default extent of the hyperbolic geodesic ball.
pub const DEFAULT_HYPERBOLIC_RADIUS: f64 = 4.0;
/// Default length of the Neumann interval.
pub const DEFAULT_INTERVAL_LENGTH: f64 = std::f64::consts::PI;
/// Default numerical window for the unbounded families.
pub const DEFAULT_WINDOW: f64 = 10.0;
/// Distance kept from the sphere poles by pointwise probes.
pub const SPHERE_POLE_MARGIN: f64 = 1e-3;

/// The geometries that reduce to a single coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    EuclideanLine,
    EuclideanRadial,
    Circle,
    HalfLineNeumann,
    IntervalNeumann,
    SphereRadial,
    HyperbolicRadial,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::EuclideanLine,
        Family::EuclideanRadial,
        Family::Circle,
        Family::HalfLineNeumann,
        Family::IntervalNeumann,
        Family::SphereRadial,
        Family::HyperbolicRadial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::EuclideanLine => "euclidean_line",
            Family::EuclideanRadial => "euclidean_radial",
            Family::Circle => "circle",
            Family::HalfLineNeumann => "half_line_neumann",
            Family::IntervalNeumann => "interval_neumann",
            Family::SphereRadial => "sphere_radial",
            Family::HyperbolicRadial => "hyperbolic_radial",
        }
    }

    /// Radial reductions of an m-dimensional model.
    pub fn is_radial(self) -> bool {
        matches!(self, Family::EuclideanRadial | Family::SphereRadial | Family::HyperbolicRadial)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Unknown { kind: "family", name: s.to_string() })
    }
}

/// Drift field in the model coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Drift {
    #[default]
    None,
    /// `Z = c ∂_x`.
    Constant(f64),
}

impl Drift {
    pub fn value(self) -> f64 {
        match self {
            Drift::None => 0.0,
            Drift::Constant(c) => c,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value() == 0.0
    }
}

impl fmt::Display for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::None => f.write_str("none"),
            Drift::Constant(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for Drift {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "none" {
            return Ok(Drift::None);
        }
        let c = s
            .strip_prefix("const:")
            .and_then(|v| v.parse::<f64>().ok())
            .filter(|c| c.is_finite())
            .ok_or_else(|| Error::Unknown { kind: "drift expression", name: s.to_string() })?;
        Ok(Drift::Constant(c))
    }
}

/// A model geometry with its curvature-dimension data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ManifoldDoc", into = "ManifoldDoc")]
pub struct ModelManifold {
    family: Family,
    m: u32,
    n: f64,
    k: f64,
    sigma: Option<f64>,
    drift: Drift,
    length: f64,
}

/// Flat key-value form of a [`ModelManifold`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldDoc {
    pub family: String,
    pub m: u32,
    pub n: f64,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "none_drift")]
    pub drift: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

fn none_drift() -> String {
    "none".to_string()
}

impl TryFrom<ManifoldDoc> for ModelManifold {
    type Error = Error;

    fn try_from(doc: ManifoldDoc) -> Result<Self> {
        let family: Family = doc.family.parse()?;
        let drift: Drift = doc.drift.parse()?;
        let mut manifold = make_model_manifold(family, doc.m, doc.n, drift)?;
        if let Some(length) = doc.length {
            manifold = manifold.with_length(length)?;
        }
        if let Some(k) = doc.k {
            manifold = manifold.with_curvature(k)?;
        }
        if let Some(sigma) = doc.sigma {
            manifold = manifold.with_sigma(sigma)?;
        }
        Ok(manifold)
    }
}

impl From<ModelManifold> for ManifoldDoc {
    fn from(m: ModelManifold) -> Self {
        ManifoldDoc {
            family: m.family.as_str().to_string(),
            m: m.m,
            n: m.n,
            k: Some(m.k),
            sigma: m.sigma,
            drift: m.drift.to_string(),
            length: Some(m.length),
        }
    }
}

/// Builds a model manifold with its model curvature bound and boundary data.
///
/// The flat one-dimensional families need `m = 1`. A non-zero drift needs
/// `n > m` and is only implemented on the flat one-dimensional families.
pub fn make_model_manifold(family: Family, m: u32, n: f64, drift: Drift) -> Result<ModelManifold> {
    if m == 0 {
        return Err(invalid("m", "dimension must be at least 1"));
    }
    if !(n.is_finite() && n >= m as f64) {
        return Err(invalid("n", format!("effective dimension {n} must be finite and >= m = {m}")));
    }
    let flat_1d =
        matches!(family, Family::EuclideanLine | Family::Circle | Family::HalfLineNeumann | Family::IntervalNeumann);
    if flat_1d && m != 1 {
        return Err(invalid("m", format!("{family} is one-dimensional")));
    }
    if matches!(family, Family::SphereRadial | Family::HyperbolicRadial) && m < 2 {
        return Err(invalid("m", format!("{family} needs m >= 2")));
    }
    let c = drift.value();
    if !c.is_finite() {
        return Err(invalid("drift", "coefficient must be finite"));
    }
    if c != 0.0 {
        if !flat_1d {
            return Err(Error::Unsupported(format!("drift on the radial reduction of {family}")));
        }
        if n <= m as f64 {
            return Err(invalid("n", "a non-zero drift needs n > m"));
        }
    }
    let k = match family {
        Family::SphereRadial => (m - 1) as f64,
        Family::HyperbolicRadial => -((m - 1) as f64),
        _ if c != 0.0 => -c * c / (n - m as f64),
        _ => 0.0,
    };
    let length = match family {
        Family::IntervalNeumann => DEFAULT_INTERVAL_LENGTH,
        Family::HyperbolicRadial => DEFAULT_HYPERBOLIC_RADIUS,
        Family::SphereRadial => std::f64::consts::PI,
        Family::Circle => std::f64::consts::TAU,
        _ => DEFAULT_WINDOW,
    };
    let mut manifold = ModelManifold { family, m, n, k, sigma: None, drift, length };
    manifold.sigma = manifold.model_sigma();
    Ok(manifold)
}

impl ModelManifold {
    pub fn family(&self) -> Family {
        self.family
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn n(&self) -> f64 {
        self.n
    }
    /// Lower curvature-dimension bound `K`.
    pub fn k(&self) -> f64 {
        self.k
    }
    /// `max(-K, 0)`.
    pub fn k_minus(&self) -> f64 {
        (-self.k).max(0.0)
    }
    /// Lower bound on the second fundamental form of the boundary.
    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }
    pub fn drift(&self) -> Drift {
        self.drift
    }
    /// Interval length, geodesic-ball radius, or the numerical window of an
    /// unbounded family.
    pub fn length(&self) -> f64 {
        self.length
    }

    fn model_sigma(&self) -> Option<f64> {
        match self.family {
            Family::HalfLineNeumann | Family::IntervalNeumann => Some(0.0),
            // Geodesic sphere of radius R: every principal curvature is coth R.
            Family::HyperbolicRadial => Some(coth(self.length)),
            _ => None,
        }
    }

    fn model_k(&self) -> f64 {
        make_model_manifold(self.family, self.m, self.n, self.drift).map(|m| m.k).unwrap_or(self.k)
    }

    /// Replaces `K` by a weaker lower bound.
    pub fn with_curvature(mut self, k: f64) -> Result<Self> {
        if !k.is_finite() || k > self.model_k() + 1e-12 {
            return Err(invalid("K", format!("{k} exceeds the model bound {}", self.model_k())));
        }
        self.k = k;
        Ok(self)
    }

    /// Replaces `sigma` by a weaker lower bound.
    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        match self.model_sigma() {
            None => Err(invalid("sigma", format!("{} has no boundary", self.family))),
            Some(s) if !sigma.is_finite() || sigma > s + 1e-12 => {
                Err(invalid("sigma", format!("{sigma} exceeds the model bound {s}")))
            }
            Some(_) => {
                self.sigma = Some(sigma);
                Ok(self)
            }
        }
    }

    /// Sets the interval length, ball radius or numerical window.
    pub fn with_length(mut self, length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid("length", format!("must be positive, got {length}")));
        }
        match self.family {
            Family::Circle | Family::SphereRadial => {
                return Err(invalid("length", format!("{} has a fixed size", self.family)))
            }
            _ => {}
        }
        let sigma_was_model = self.sigma == self.model_sigma();
        self.length = length;
        if sigma_was_model {
            self.sigma = self.model_sigma();
        }
        Ok(self)
    }

    /// True when reflection at a boundary occurs.
    pub fn has_boundary(&self) -> bool {
        self.sigma.is_some()
    }

    /// Coordinate range `[lo, hi]` of the reduction (the window for unbounded
    /// families).
    pub fn domain(&self) -> (f64, f64) {
        match self.family {
            Family::EuclideanLine => (-self.length, self.length),
            _ => (0.0, self.length),
        }
    }

    /// Reflecting walls `(lower, upper)` of the reduced process.
    pub fn walls(&self) -> (Option<f64>, Option<f64>) {
        match self.family {
            Family::HalfLineNeumann => (Some(0.0), None),
            Family::IntervalNeumann => (Some(0.0), Some(self.length)),
            Family::HyperbolicRadial => (None, Some(self.length)),
            _ => (None, None),
        }
    }

    /// First-order coefficient `b(x) + Z(x)` of `L = ∂² + (b + Z)∂`.
    pub fn first_order(&self, x: f64) -> f64 {
        let mm1 = (self.m - 1) as f64;
        let b = match self.family {
            Family::EuclideanRadial if self.m > 1 => mm1 / x,
            Family::SphereRadial => mm1 / x.tan(),
            Family::HyperbolicRadial => mm1 * coth(x),
            _ => 0.0,
        };
        b + self.drift.value()
    }

    /// Density `w` with `L u = w⁻¹ (w u')'`, normalized to be 1 at the
    /// origin of the coordinate for flat families.
    pub fn weight(&self, x: f64) -> f64 {
        let p = (self.m - 1) as i32;
        let vol = match self.family {
            Family::EuclideanRadial => x.powi(p),
            Family::SphereRadial => x.sin().powi(p),
            Family::HyperbolicRadial => x.sinh().powi(p),
            _ => 1.0,
        };
        vol * (self.drift.value() * x).exp()
    }
}

/// Result of a finite-difference curvature-dimension probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdCheckReport {
    pub points: usize,
    pub min_defect: f64,
    pub worst_coord: f64,
    pub step: f64,
}

impl CdCheckReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.min_defect >= -tol
    }
}

/// Evaluates `½L|∇f|² − ⟨∇Lf, ∇f⟩ − K|∇f|² − (Lf)²/n` by central
/// differences of step `h` at the interior points of `grid`.
pub fn cd_check<F: Fn(f64) -> f64>(manifold: &ModelManifold, f: F, grid: &[f64], h: f64) -> Result<CdCheckReport> {
    if grid.len() < 5 {
        return Err(invalid("grid", format!("{} points, the stencil needs at least 5", grid.len())));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", format!("must be positive, got {h}")));
    }
    let k = manifold.k();
    let n = manifold.n();
    let mut report = CdCheckReport { points: 0, min_defect: f64::INFINITY, worst_coord: f64::NAN, step: h };
    for &x in &grid[1..grid.len() - 1] {
        let (fm2, fm1, f0, fp1, fp2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
        let d1 = (fp1 - fm1) / (2.0 * h);
        let d2 = (fp1 - 2.0 * f0 + fm1) / (h * h);
        let d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
        let b = manifold.first_order(x);
        let db = (manifold.first_order(x + h) - manifold.first_order(x - h)) / (2.0 * h);
        // ½L(f'²) with (f'²)' = 2f'f'' and (f'²)'' = 2f''² + 2f'f'''.
        let half_l_grad_sq = d2 * d2 + d1 * d3 + b * d1 * d2;
        // f'·(Lf)' with (Lf)' = f''' + b'f' + bf''.
        let grad_dot = d1 * (d3 + db * d1 + b * d2);
        let lf = d2 + b * d1;
        let defect = half_l_grad_sq - grad_dot - k * d1 * d1 - lf * lf / n;
        report.points += 1;
        if defect < report.min_defect {
            report.min_defect = defect;
            report.worst_coord = x;
        }
    }
    Ok(report)
}

/// `√(K(n−1))·coth(√(K/(n−1))·r)`, the mean-curvature comparison bound for
/// distance spheres of radius `r` under `Ric ≥ −K`.
pub fn laplacian_comparison(k_region: f64, n: f64, r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid("r", format!("distance must be positive, got {r}")));
    }
    if !(k_region.is_finite() && k_region >= 0.0) {
        return Err(invalid("k_region", format!("must be >= 0, got {k_region}")));
    }
    if k_region > 0.0 && n <= 1.0 {
        return Err(invalid("n", "must exceed 1 when k_region > 0"));
    }
    if k_region == 0.0 {
        return Ok((n - 1.0) / r);
    }
    let y = (k_region / (n - 1.0)).sqrt() * r;
    Ok((n - 1.0) / r * x_coth(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
    }

    #[test]
    fn model_constants() {
        let c = make_model_manifold(Family::Circle, 1, 1.0, Drift::None).unwrap();
        assert_eq!((c.k(), c.sigma()), (0.0, None));
        let s = make_model_manifold(Family::SphereRadial, 2, 2.0, Drift::None).unwrap();
        assert_eq!(s.k(), 1.0);
        let h = make_model_manifold(Family::HalfLineNeumann, 1, 1.0, Drift::None).unwrap();
        assert_eq!((h.k(), h.sigma()), (0.0, Some(0.0)));
        let hy = make_model_manifold(Family::HyperbolicRadial, 3, 3.0, Drift::None).unwrap();
        assert_eq!(hy.k(), -2.0);
        assert!((hy.sigma().unwrap() - 1.0 / 4f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn constant_drift_lowers_the_bound() {
        let m = make_model_manifold(Family::IntervalNeumann, 1, 3.0, Drift::Constant(2.0)).unwrap();
        assert_eq!(m.k(), -2.0);
    }

    #[test]
    fn construction_errors() {
        assert!(make_model_manifold(Family::Circle, 1, 0.5, Drift::None).is_err());
        assert!(make_model_manifold(Family::Circle, 1, 1.0, Drift::Constant(1.0)).is_err());
        assert!(make_model_manifold(Family::SphereRadial, 2, 3.0, Drift::Constant(1.0)).is_err());
        assert!("torus".parse::<Family>().is_err());
        let s = make_model_manifold(Family::SphereRadial, 2, 2.0, Drift::None).unwrap();
        assert!(s.clone().with_curvature(2.0).is_err());
        assert_eq!(s.with_curvature(0.5).unwrap().k(), 0.5);
    }

    #[test]
    fn key_value_round_trip() {
        let m = make_model_manifold(Family::IntervalNeumann, 1, 2.0, Drift::Constant(0.5))
            .unwrap()
            .with_length(2.0)
            .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"drift\":\"const:0.5\""));
        let back: ModelManifold = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let doc = r#"{"family":"sphere_radial","m":2,"n":2,"drift":"none"}"#;
        let s: ModelManifold = serde_json::from_str(doc).unwrap();
        assert_eq!(s.k(), 1.0);
    }

    #[test]
    fn flat_radial_square_distance_has_zero_defect() {
        for m in 1..=4u32 {
            let e = make_model_manifold(Family::EuclideanRadial, m, m as f64, Drift::None).unwrap();
            let r = cd_check(&e, |r| r * r, &grid(0.5, 3.0, 40), 1e-3).unwrap();
            assert!(r.min_defect.abs() < 100.0 * 1e-6, "m={m}: {}", r.min_defect);
        }
    }

    #[test]
    fn constants_have_zero_defect() {
        for fam in Family::ALL {
            let m = if fam.is_radial() { 2 } else { 1 };
            let mf = make_model_manifold(fam, m, m as f64, Drift::None).unwrap();
            let r = cd_check(&mf, |_| 3.0, &grid(0.5, 2.5, 20), 1e-3).unwrap();
            assert_eq!(r.min_defect, 0.0);
        }
    }

    #[test]
    fn circle_sine_probe_is_non_negative() {
        let c = make_model_manifold(Family::Circle, 1, 1.0, Drift::None).unwrap();
        let r = cd_check(&c, f64::sin, &grid(0.0, std::f64::consts::TAU, 200), 1e-3).unwrap();
        assert!(r.min_defect >= -1e-6);
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let c = make_model_manifold(Family::Circle, 1, 1.0, Drift::None).unwrap();
        assert!(cd_check(&c, f64::sin, &[0.0, 1.0, 2.0, 3.0], 1e-3).is_err());
    }

    #[test]
    fn comparison_values() {
        assert_eq!(laplacian_comparison(0.0, 2.0, 1.0).unwrap(), 1.0);
        let v = laplacian_comparison(1.0, 2.0, 1.0).unwrap();
        assert!((v - 1.313_035_285_499_331_3).abs() < 1e-14);
        assert!((laplacian_comparison(1.0, 2.0, 50.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(laplacian_comparison(1.0, 1.0, 1.0).is_err());
        assert!(laplacian_comparison(1.0, 2.0, 0.0).is_err());
    }
}
