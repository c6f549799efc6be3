use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::{BoundId, BoundParams, ClockFamily};
use crate::error::{invalid, Error, Result};
use crate::geometry::ModelManifold;
use crate::heatflow::{InitialDatum, Scheme};
use crate::stochastic::{Functional, ReflectionScheme};

/// A bound together with the parameter lists it is swept over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub id: BoundId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eps: Vec<f64>,
    #[serde(default, rename = "K_prime", skip_serializing_if = "Vec::is_empty")]
    pub k_prime: Vec<f64>,
    #[serde(default, rename = "R", skip_serializing_if = "Vec::is_empty")]
    pub radius: Vec<f64>,
    /// Curvature modulus on the ball; defaults to the manifold's `K⁻`.
    #[serde(default, rename = "K_region", skip_serializing_if = "Option::is_none")]
    pub k_region: Option<f64>,
}

impl BoundSpec {
    pub fn new(id: BoundId) -> Self {
        Self { id, alpha: vec![], eps: vec![], k_prime: vec![], radius: vec![], k_region: None }
    }

    pub fn with_alpha(mut self, alpha: &[f64]) -> Self {
        self.alpha = alpha.to_vec();
        self
    }

    pub fn with_eps(mut self, eps: &[f64]) -> Self {
        self.eps = eps.to_vec();
        self
    }

    pub fn with_radius(mut self, radius: &[f64]) -> Self {
        self.radius = radius.to_vec();
        self
    }

    /// Cartesian product of the parameter lists for one `(n, K, t)`.
    pub fn expand(&self, n: f64, k: f64, t: f64, k_minus: f64) -> Vec<BoundParams> {
        fn axis(v: &[f64]) -> Vec<Option<f64>> {
            if v.is_empty() {
                vec![None]
            } else {
                v.iter().map(|x| Some(*x)).collect()
            }
        }
        let mut out = vec![];
        for alpha in axis(&self.alpha) {
            for eps in axis(&self.eps) {
                for kp in axis(&self.k_prime) {
                    for radius in axis(&self.radius) {
                        let mut p = BoundParams::new(n, k, t);
                        p.alpha = alpha;
                        p.eps = eps;
                        p.k_prime = kp;
                        if let Some(r) = radius {
                            p = p.ball(r, self.k_region.unwrap_or(k_minus));
                        }
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

/// What a Monte-Carlo estimate is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum McCheck {
    /// Report only.
    None,
    /// Agreement with a fixed value within `k` standard errors.
    Equals { value: f64 },
    /// Agreement with the solver's `u_t(x)`.
    HeatValue,
    /// Agreement with `(n/2)u_t·∫ℓ′²e^{−2Ks} − Lu_t·∫(ℓ²)′e^{−2Ks}` (constant `K`, `σ = 0`).
    J0Deterministic,
    /// `|∇u_t|²/u_t ≤ estimate + k·SE`.
    J0Upper,
    /// `|∇u_t| ≤ estimate + k·SE`.
    GUpper,
}

/// One Monte-Carlo estimate to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McTask {
    pub manifold: ModelManifold,
    pub datum: InitialDatum,
    /// Start point; snapped to the nearest solver node.
    pub x: f64,
    pub t: f64,
    pub functional: Functional,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock: Option<ClockFamily>,
    /// Constant `K` of the path weight; defaults to the manifold's.
    #[serde(default, rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Constant `σ` of the path weight; defaults to the manifold's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default = "default_check")]
    pub check: McCheck,
}

fn default_check() -> McCheck {
    McCheck::None
}

/// Monte-Carlo settings shared by all tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSettings {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    #[serde(default)]
    pub scheme: ReflectionScheme,
    #[serde(default)]
    pub tasks: Vec<McTask>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Pass threshold `margin ≥ −rel·(1 + |c|)`.
    #[serde(default = "default_rel")]
    pub rel: f64,
    /// Standard errors allowed in Monte-Carlo checks.
    #[serde(default = "default_sigmas")]
    pub mc_sigmas: f64,
}

fn default_rel() -> f64 {
    1e-6
}

fn default_sigmas() -> f64 {
    3.0
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: default_rel(), mc_sigmas: default_sigmas() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<ReportFormat>,
}

fn default_formats() -> Vec<ReportFormat> {
    vec![ReportFormat::Csv, ReportFormat::Json]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::Unknown { kind: "report format", name: s.to_string() }),
        }
    }
}

/// A declarative experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub manifolds: Vec<ModelManifold>,
    #[serde(default)]
    pub data: Vec<InitialDatum>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default = "default_grid")]
    pub grid_size: usize,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default)]
    pub bounds: Vec<BoundSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McSettings>,
    #[serde(default)]
    pub tolerance: Tolerance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

fn default_grid() -> usize {
    96
}

fn default_scheme() -> Scheme {
    Scheme::Spectral
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.times.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(invalid("times", format!("must be strictly positive, got {t}")));
        }
        if !(self.tolerance.rel > 0.0 && self.tolerance.mc_sigmas > 0.0) {
            return Err(invalid("tolerance", "must be positive"));
        }
        if self.grid_size < 3 {
            return Err(invalid("grid_size", "need at least 3 nodes"));
        }
        if let Some(mc) = &self.mc {
            if mc.n_paths < 2 || !(mc.dt > 0.0) {
                return Err(invalid("mc", "need n_paths >= 2 and dt > 0"));
            }
        }
        Ok(())
    }
}
