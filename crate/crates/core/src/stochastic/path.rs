use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Family, ModelManifold};
use crate::numeric::{x_cot, x_coth};

/// Resampling attempts per step before a chart escape is reported as an error.
pub const MAX_RESAMPLES: usize = 1000;

/// How the Euler step is pushed back into the domain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionScheme {
    /// Skorokhod projection of the endpoint; local time = projection distance.
    Projection,
    /// Projection of the Brownian-bridge extremum of the step, sampled from
    /// its conditional law. Exact for reflected Brownian motion with constant
    /// drift and a single wall.
    #[default]
    Bridge,
}

impl fmt::Display for ReflectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReflectionScheme::Projection => "projection",
            ReflectionScheme::Bridge => "bridge",
        })
    }
}

impl FromStr for ReflectionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projection" => Ok(ReflectionScheme::Projection),
            "bridge" => Ok(ReflectionScheme::Bridge),
            _ => Err(Error::Unknown { kind: "reflection scheme", name: s.to_string() }),
        }
    }
}

/// A bounded scalar field on the model coordinate.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl ScalarField {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField::Custom(Arc::new(f))
    }

    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Custom(f) => f(x),
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            ScalarField::Constant(c) => Some(*c),
            ScalarField::Custom(_) => None,
        }
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => write!(f, "Constant({c})"),
            ScalarField::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Curvature `K(·)` and boundary curvature `σ(·)` entering path weights.
#[derive(Debug, Clone)]
pub struct Potentials {
    pub k: ScalarField,
    pub sigma: ScalarField,
}

impl Potentials {
    /// The manifold's constant bounds (`σ = 0` without boundary).
    pub fn from_manifold(manifold: &ModelManifold) -> Self {
        Self { k: ScalarField::Constant(manifold.k()), sigma: ScalarField::Constant(manifold.sigma().unwrap_or(0.0)) }
    }

    pub fn constant(k: f64, sigma: f64) -> Self {
        Self { k: ScalarField::Constant(k), sigma: ScalarField::Constant(sigma) }
    }
}

/// Outcome of one reflected step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Step {
    pub x: f64,
    pub dl_lower: f64,
    pub dl_upper: f64,
    pub resampled: usize,
}

/// Euler–Maruyama stepper for `dX = (b + Z)dt + √2 dB + dL` in the model
/// coordinate.
#[derive(Debug, Clone)]
pub(crate) struct Stepper<'a> {
    manifold: &'a ModelManifold,
    dt: f64,
    noise: f64,
    scheme: ReflectionScheme,
    lower: Option<f64>,
    upper: Option<f64>,
    chart: (f64, f64),
}

impl<'a> Stepper<'a> {
    pub fn new(manifold: &'a ModelManifold, dt: f64, scheme: ReflectionScheme) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        let (lower, upper) = manifold.walls();
        let chart = match manifold.family() {
            Family::SphereRadial => (0.0, std::f64::consts::PI),
            Family::EuclideanRadial | Family::HyperbolicRadial => (0.0, f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        Ok(Self { manifold, dt, noise: (2.0 * dt).sqrt(), scheme, lower, upper, chart })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Checks that `x` lies in the closed domain of the process.
    pub fn check_start(&self, x: f64) -> Result<()> {
        let inside_walls = self.lower.is_none_or(|a| x >= a) && self.upper.is_none_or(|b| x <= b);
        let at_pole = x == 0.0 && matches!(self.manifold.family(), Family::EuclideanRadial | Family::HyperbolicRadial);
        let in_chart = (x > self.chart.0 && x < self.chart.1) || at_pole;
        if !(x.is_finite() && inside_walls && in_chart) {
            return Err(invalid("x0", format!("{x} is outside the domain of {}", self.manifold.family())));
        }
        Ok(())
    }

    /// Radial step: the `(m−1)/r` part of the drift is integrated exactly as
    /// the norm of an `m`-dimensional Gaussian step, the smooth remainder by
    /// Euler. Sphere points past `π/2` are stepped from the antipode.
    fn radial_step<R: Rng>(&self, x: f64, rng: &mut R) -> f64 {
        let m = self.manifold.m();
        let mm1 = (m - 1) as f64;
        let sphere = self.manifold.family() == Family::SphereRadial;
        let flip = sphere && x > std::f64::consts::FRAC_PI_2;
        let r = if flip { std::f64::consts::PI - x } else { x };
        let smooth = match self.manifold.family() {
            _ if r <= 0.0 => 0.0,
            Family::SphereRadial => mm1 * (x_cot(r) - 1.0) / r,
            Family::HyperbolicRadial => mm1 * (x_coth(r) - 1.0) / r,
            _ => 0.0,
        };
        let z0: f64 = rng.sample(StandardNormal);
        let lead = r + smooth * self.dt + self.noise * z0;
        let mut sq = lead * lead;
        for _ in 1..m {
            let z: f64 = rng.sample(StandardNormal);
            sq += self.noise * self.noise * z * z;
        }
        let r_new = sq.sqrt();
        if flip {
            std::f64::consts::PI - r_new
        } else {
            r_new
        }
    }

    #[inline]
    pub fn step<R: Rng>(&self, x: f64, rng: &mut R) -> Result<Step> {
        let mut resampled = 0;
        let y = loop {
            let y = if self.manifold.family().is_radial() {
                self.radial_step(x, rng)
            } else {
                let z: f64 = rng.sample(StandardNormal);
                x + self.manifold.first_order(x) * self.dt + self.noise * z
            };
            if y > self.chart.0 && y < self.chart.1 || (y == 0.0 && self.chart.0 == 0.0) {
                break y;
            }
            resampled += 1;
            if resampled > MAX_RESAMPLES {
                return Err(Error::Stability(format!(
                    "{MAX_RESAMPLES} consecutive steps left the coordinate chart from x = {x}"
                )));
            }
        };
        let (mut y, mut dl_lower, mut dl_upper) = (y, 0.0, 0.0);
        match self.scheme {
            ReflectionScheme::Projection => {
                if let Some(a) = self.lower.filter(|a| y < *a) {
                    dl_lower = a - y;
                    y = a;
                }
                if let Some(b) = self.upper.filter(|b| y > *b) {
                    dl_upper = y - b;
                    y = b;
                }
            }
            ReflectionScheme::Bridge => {
                let inc = y - x;
                if let Some(a) = self.lower {
                    // P(min < a | endpoints) = exp(−(x−a)(y−a)/Δ) for y ≥ a.
                    if y < a || (x - a) * (y - a) / self.dt < 40.0 {
                        let u = 1.0 - rng.random::<f64>();
                        let min = x + 0.5 * (inc - (inc * inc - 4.0 * self.dt * u.ln()).sqrt());
                        if min < a {
                            dl_lower = a - min;
                            y += dl_lower;
                        }
                    }
                }
                if let Some(b) = self.upper {
                    if y > b || (b - x) * (b - y) / self.dt < 40.0 {
                        let u = 1.0 - rng.random::<f64>();
                        let max = x + 0.5 * (inc + (inc * inc - 4.0 * self.dt * u.ln()).sqrt());
                        if max > b {
                            dl_upper = max - b;
                            y -= dl_upper;
                        }
                    }
                }
                // Both walls within one step: fall back to projection.
                if let Some(a) = self.lower.filter(|a| y < *a) {
                    dl_lower += a - y;
                    y = a;
                }
            }
        }
        Ok(Step { x: y, dl_lower, dl_upper, resampled })
    }
}

/// Deterministic generator for path `index` of a run seeded with `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A simulated reflected path on the grid `s_k = kΔ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub dt: f64,
    pub seed: u64,
    pub path_index: u64,
    pub scheme: ReflectionScheme,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// Local time charged at the lower wall during step `k → k+1`.
    pub local_time_lower: Vec<f64>,
    /// Local time charged at the upper wall during step `k → k+1`.
    pub local_time_upper: Vec<f64>,
    /// `∫₀^{s_k} K(X_r) dr` by the left-point rule.
    pub curvature_integral: Vec<f64>,
    /// `∫₀^{s_k} σ dL`.
    pub boundary_integral: Vec<f64>,
    /// Number of resampled steps that left the coordinate chart.
    pub resampled: usize,
}

impl PathSample {
    pub fn steps(&self) -> usize {
        self.positions.len() - 1
    }

    /// `ΔL_k` for each step.
    pub fn local_time_increments(&self) -> Vec<f64> {
        self.local_time_lower.iter().zip(&self.local_time_upper).map(|(a, b)| a + b).collect()
    }

    /// `L_{s_k}` for each grid time.
    pub fn local_time(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.local_time_increments().into_iter().map(|d| {
                acc += d;
                acc
            }))
            .collect()
    }

    fn index_at(&self, s: f64) -> Result<usize> {
        let horizon = *self.times.last().expect("non-empty path");
        if !(s >= 0.0 && s <= horizon * (1.0 + 1e-12)) {
            return Err(invalid("s", format!("{s} outside [0, {horizon}]")));
        }
        Ok(((s / self.dt + 1e-9).floor() as usize).min(self.steps()))
    }
}

/// Simulates one reflected path with explicit scheme, potentials and path index.
#[allow(clippy::too_many_arguments)]
pub fn simulate_path(
    manifold: &ModelManifold,
    x0: f64,
    t: f64,
    dt: f64,
    seed: u64,
    path_index: u64,
    scheme: ReflectionScheme,
    potentials: &Potentials,
) -> Result<PathSample> {
    let stepper = Stepper::new(manifold, dt, scheme)?;
    stepper.check_start(x0)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be >= 0, got {t}")));
    }
    let steps = step_count(t, dt);
    let mut rng = path_rng(seed, path_index);
    let (lower, upper) = manifold.walls();
    let mut s = PathSample {
        dt,
        seed,
        path_index,
        scheme,
        times: (0..=steps).map(|k| k as f64 * dt).collect(),
        positions: Vec::with_capacity(steps + 1),
        local_time_lower: Vec::with_capacity(steps),
        local_time_upper: Vec::with_capacity(steps),
        curvature_integral: Vec::with_capacity(steps + 1),
        boundary_integral: Vec::with_capacity(steps + 1),
        resampled: 0,
    };
    let (mut x, mut a, mut b) = (x0, 0.0, 0.0);
    s.positions.push(x);
    s.curvature_integral.push(0.0);
    s.boundary_integral.push(0.0);
    for _ in 0..steps {
        let st = stepper.step(x, &mut rng)?;
        a += potentials.k.at(x) * dt;
        if st.dl_lower > 0.0 {
            b += potentials.sigma.at(lower.unwrap_or(st.x)) * st.dl_lower;
        }
        if st.dl_upper > 0.0 {
            b += potentials.sigma.at(upper.unwrap_or(st.x)) * st.dl_upper;
        }
        x = st.x;
        s.resampled += st.resampled;
        s.positions.push(x);
        s.local_time_lower.push(st.dl_lower);
        s.local_time_upper.push(st.dl_upper);
        s.curvature_integral.push(a);
        s.boundary_integral.push(b);
    }
    Ok(s)
}

/// Number of Euler steps covering `[0, t]`; `t` is truncated to a multiple
/// of `Δ` (up to rounding).
pub(crate) fn step_count(t: f64, dt: f64) -> usize {
    (t / dt + 1e-9).floor() as usize
}

/// Simulates path 0 of `seed` with the default scheme and the manifold's
/// constant potentials.
pub fn simulate_reflected_path(manifold: &ModelManifold, x0: f64, t: f64, dt: f64, seed: u64) -> Result<PathSample> {
    simulate_path(manifold, x0, t, dt, seed, 0, ReflectionScheme::default(), &Potentials::from_manifold(manifold))
}

/// `e^{−2(∫₀ˢK dr + ∫₀ˢσ dL)}` along `sample`, by left-point sums.
pub fn path_weight(sample: &PathSample, manifold: &ModelManifold, potentials: &Potentials, s: f64) -> Result<f64> {
    let n = sample.index_at(s)?;
    let (lower, upper) = manifold.walls();
    let mut exponent = 0.0;
    for k in 0..n {
        let x = sample.positions[k];
        exponent += potentials.k.at(x) * sample.dt;
        if let Some(a) = lower {
            exponent += potentials.sigma.at(a) * sample.local_time_lower[k];
        }
        if let Some(b) = upper {
            exponent += potentials.sigma.at(b) * sample.local_time_upper[k];
        }
    }
    Ok((-2.0 * exponent).exp())
}
