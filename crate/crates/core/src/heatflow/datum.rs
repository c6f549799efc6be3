use serde::{Deserialize, Serialize};

use super::special::gegenbauer_with_derivatives;
use crate::error::{invalid, Error, Result};
use crate::geometry::{Family, ModelManifold};

/// Positivity floor below which Harnack quantities are undefined.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

/// Initial data expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatumKind {
    /// `u₀ ≡ value`.
    Constant { value: f64 },
    /// `1 + amplitude·φ_k` with the k-th Neumann eigenfunction normalized to
    /// `max|φ_k| = 1`.
    EigenMode { k: u32, amplitude: f64 },
    /// `1 + amplitude·cos(wavenumber·x)`.
    Cosine { amplitude: f64, wavenumber: f64 },
    /// `1 + amplitude·exp(−x²/width²)`.
    GaussianBump { amplitude: f64, width: f64 },
    /// Values at the nodes of a solver grid, linearly interpolated elsewhere.
    Sampled { coords: Vec<f64>, values: Vec<f64> },
}

/// An initial datum together with the positivity floor it must respect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDatum {
    #[serde(flatten)]
    pub kind: DatumKind,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_floor() -> f64 {
    POSITIVITY_FLOOR
}

impl From<DatumKind> for InitialDatum {
    fn from(kind: DatumKind) -> Self {
        Self { kind, floor: POSITIVITY_FLOOR }
    }
}

impl InitialDatum {
    pub fn constant(value: f64) -> Self {
        DatumKind::Constant { value }.into()
    }

    pub fn eigenmode(k: u32, amplitude: f64) -> Self {
        DatumKind::EigenMode { k, amplitude }.into()
    }

    pub fn cosine(amplitude: f64, wavenumber: f64) -> Self {
        DatumKind::Cosine { amplitude, wavenumber }.into()
    }

    pub fn gaussian_bump(amplitude: f64, width: f64) -> Self {
        DatumKind::GaussianBump { amplitude, width }.into()
    }

    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        match &self.kind {
            DatumKind::Constant { value } => format!("constant({value})"),
            DatumKind::EigenMode { k, amplitude } => format!("1+{amplitude}*phi_{k}"),
            DatumKind::Cosine { amplitude, wavenumber } => format!("1+{amplitude}*cos({wavenumber}x)"),
            DatumKind::GaussianBump { amplitude, width } => {
                format!("1+{amplitude}*exp(-x^2/{width}^2)")
            }
            DatumKind::Sampled { values, .. } => format!("sampled({})", values.len()),
        }
    }

    /// True for eigenmodes of families whose eigenfunctions are only known
    /// through the discretized operator.
    pub fn needs_discrete_basis(&self, manifold: &ModelManifold) -> bool {
        matches!(self.kind, DatumKind::EigenMode { .. })
            && matches!(manifold.family(), Family::HyperbolicRadial | Family::EuclideanRadial)
    }

    /// `(u₀, u₀′, u₀″)` at `x`, for closed-form data.
    pub fn jet(&self, manifold: &ModelManifold, x: f64) -> Result<(f64, f64, f64)> {
        match &self.kind {
            DatumKind::Constant { value } => Ok((*value, 0.0, 0.0)),
            DatumKind::Cosine { amplitude, wavenumber: w } => {
                let (s, c) = (w * x).sin_cos();
                Ok((1.0 + amplitude * c, -amplitude * w * s, -amplitude * w * w * c))
            }
            DatumKind::GaussianBump { amplitude, width } => {
                let z = x / width;
                let e = amplitude * (-z * z).exp();
                let w2 = width * width;
                Ok((1.0 + e, -2.0 * x / w2 * e, (4.0 * x * x / (w2 * w2) - 2.0 / w2) * e))
            }
            DatumKind::EigenMode { k, amplitude } => {
                let (p, dp, ddp) = eigenfunction_jet(manifold, *k, x)?;
                Ok((1.0 + amplitude * p, amplitude * dp, amplitude * ddp))
            }
            DatumKind::Sampled { coords, values } => sampled_jet(coords, values, x),
        }
    }

    /// `(u₀, |∇u₀|, Lu₀)` at `x`.
    pub fn point(&self, manifold: &ModelManifold, x: f64) -> Result<(f64, f64, f64)> {
        let (u, du, ddu) = self.jet(manifold, x)?;
        Ok((u, du.abs(), generator(manifold, x, du, ddu)))
    }

    /// Rejects data that are not positive or violate the Neumann condition.
    pub fn validate(&self, manifold: &ModelManifold) -> Result<()> {
        if !(self.floor.is_finite() && self.floor > 0.0) {
            return Err(invalid("floor", format!("must be positive, got {}", self.floor)));
        }
        if let DatumKind::Sampled { coords, values } = &self.kind {
            if coords.len() != values.len() || coords.len() < 2 {
                return Err(invalid("values", "sampled data need matching coords/values, len >= 2"));
            }
            if coords.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(invalid("coords", "must be strictly increasing"));
            }
            return match values.iter().zip(coords).find(|(v, _)| !(**v >= self.floor)) {
                Some((v, x)) => Err(Error::Positivity { value: *v, coord: *x }),
                None => Ok(()),
            };
        }
        if self.needs_discrete_basis(manifold) {
            return Ok(());
        }
        let (lo, hi) = manifold.domain();
        for i in 0..=2000 {
            let x = lo + (hi - lo) * i as f64 / 2000.0;
            let (u, _, _) = self.jet(manifold, x)?;
            if !(u >= self.floor) {
                return Err(Error::Positivity { value: u, coord: x });
            }
        }
        let (lower, upper) = manifold.walls();
        for wall in [lower, upper].into_iter().flatten() {
            let (u, du, _) = self.jet(manifold, wall)?;
            if du.abs() > 1e-10 * (1.0 + u.abs()) {
                return Err(invalid(
                    "initial datum",
                    format!("normal derivative {du:e} at the wall x = {wall} violates the Neumann condition"),
                ));
            }
        }
        if manifold.family() == Family::Circle {
            let (u0, d0, _) = self.jet(manifold, 0.0)?;
            let (u1, d1, _) = self.jet(manifold, std::f64::consts::TAU)?;
            if (u0 - u1).abs() > 1e-10 * (1.0 + u0.abs()) || (d0 - d1).abs() > 1e-10 * (1.0 + d0.abs()) {
                return Err(invalid("initial datum", "not 2pi-periodic"));
            }
        }
        Ok(())
    }
}

/// `u″ + (b + Z)u′`, with the regular limit `m·u″` at a radial pole.
pub fn generator(manifold: &ModelManifold, x: f64, du: f64, ddu: f64) -> f64 {
    let pole = manifold.family().is_radial()
        && (x.abs() < 1e-9 || (manifold.family() == Family::SphereRadial && (x - std::f64::consts::PI).abs() < 1e-9));
    if pole {
        manifold.m() as f64 * ddu
    } else {
        ddu + manifold.first_order(x) * du
    }
}

/// Eigenvalue of `−L` for the k-th closed-form Neumann eigenfunction.
pub fn eigenvalue(manifold: &ModelManifold, k: u32) -> Result<f64> {
    let k = k as f64;
    match manifold.family() {
        Family::Circle => Ok(k * k),
        Family::IntervalNeumann => {
            let w = k * std::f64::consts::PI / manifold.length();
            Ok(w * w)
        }
        Family::SphereRadial => Ok(k * (k + manifold.m() as f64 - 1.0)),
        f => Err(Error::Unsupported(format!("closed-form eigenfunctions on {f}"))),
    }
}

/// `(φ_k, φ_k′, φ_k″)` normalized to `max|φ_k| = 1`.
pub fn eigenfunction_jet(manifold: &ModelManifold, k: u32, x: f64) -> Result<(f64, f64, f64)> {
    if !manifold.drift().is_zero() {
        return Err(Error::Unsupported("closed-form eigenfunctions with drift".to_string()));
    }
    match manifold.family() {
        Family::Circle | Family::IntervalNeumann => {
            let w = eigenvalue(manifold, k)?.sqrt();
            let (s, c) = (w * x).sin_cos();
            Ok((c, -w * s, -w * w * c))
        }
        Family::SphereRadial => {
            let lam = (manifold.m() as f64 - 1.0) / 2.0;
            let (s, c) = x.sin_cos();
            let (g, dg, ddg) = gegenbauer_with_derivatives(k, lam, c);
            let (g1, _, _) = gegenbauer_with_derivatives(k, lam, 1.0);
            // d/dr = −sin r d/dc; d²/dr² = sin² r d²/dc² − cos r d/dc.
            Ok((g / g1, -s * dg / g1, (s * s * ddg - c * dg) / g1))
        }
        f => Err(Error::Unsupported(format!("closed-form eigenfunctions on {f}; use a discrete basis"))),
    }
}

fn sampled_jet(coords: &[f64], values: &[f64], x: f64) -> Result<(f64, f64, f64)> {
    let n = coords.len();
    if n < 2 {
        return Err(invalid("values", "sampled data need at least 2 nodes"));
    }
    let i = match coords.partition_point(|&c| c <= x) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let (x0, x1) = (coords[i], coords[i + 1]);
    let slope = (values[i + 1] - values[i]) / (x1 - x0);
    let v = (values[i] + slope * (x - x0)).clamp(values[i].min(values[i + 1]), values[i].max(values[i + 1]));
    Ok((v, slope, 0.0))
}
