use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{path_rng, step_count, Potentials, ReflectionScheme, Stepper};
use crate::bounds::Clock;
use crate::error::{invalid, Result};
use crate::geometry::ModelManifold;
use crate::heatflow::InitialDatum;
use crate::numeric::CompensatedSum;

/// Identifier of an estimated quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalId {
    #[serde(rename = "J0_rhs")]
    J0Rhs,
    #[serde(rename = "A1_rhs")]
    A1Rhs,
    #[serde(rename = "G_rhs")]
    GRhs,
    /// `E[u₀(X_t)] = u_t(x)`.
    #[serde(rename = "heat_value")]
    HeatValue,
    /// `E[L_t]`.
    #[serde(rename = "local_time")]
    LocalTime,
    /// `E[e^{pL_t}]`.
    #[serde(rename = "local_time_moment")]
    LocalTimeMoment,
}

impl FunctionalId {
    pub fn as_str(self) -> &'static str {
        match self {
            FunctionalId::J0Rhs => "J0_rhs",
            FunctionalId::A1Rhs => "A1_rhs",
            FunctionalId::GRhs => "G_rhs",
            FunctionalId::HeatValue => "heat_value",
            FunctionalId::LocalTime => "local_time",
            FunctionalId::LocalTimeMoment => "local_time_moment",
        }
    }
}

impl std::fmt::Display for FunctionalId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A path functional together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id")]
pub enum Functional {
    /// `(n/2)E[u₀(X_t)∫ℓ′²w ds] − E[Lu₀(X_t)∫(ℓ²)′w ds]`, `w = e^{−2∫(K dr + σ dL)}`.
    #[serde(rename = "J0_rhs")]
    J0Rhs,
    /// `(nα/2)E[u₀(X_t)∫(Kℓ/(α−1) + ℓ′)² e^{2∫K dr/(α−1)} ds]`.
    #[serde(rename = "A1_rhs")]
    A1Rhs { alpha: f64 },
    /// `E[|∇u₀|(X_t) e^{−∫(K dr + σ dL)}]`.
    #[serde(rename = "G_rhs")]
    GRhs,
    #[serde(rename = "heat_value")]
    HeatValue,
    #[serde(rename = "local_time")]
    LocalTime,
    #[serde(rename = "local_time_moment")]
    LocalTimeMoment { p: f64 },
}

impl Functional {
    pub fn id(&self) -> FunctionalId {
        match self {
            Functional::J0Rhs => FunctionalId::J0Rhs,
            Functional::A1Rhs { .. } => FunctionalId::A1Rhs,
            Functional::GRhs => FunctionalId::GRhs,
            Functional::HeatValue => FunctionalId::HeatValue,
            Functional::LocalTime => FunctionalId::LocalTime,
            Functional::LocalTimeMoment { .. } => FunctionalId::LocalTimeMoment,
        }
    }
}

/// Monte-Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    #[serde(default)]
    pub scheme: ReflectionScheme,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self { n_paths: 10_000, dt: 1e-4, seed: 0, scheme: ReflectionScheme::default() }
    }
}

impl MonteCarlo {
    pub fn new(n_paths: usize, dt: f64, seed: u64) -> Self {
        Self { n_paths, dt, seed, scheme: ReflectionScheme::default() }
    }

    pub fn with_scheme(mut self, scheme: ReflectionScheme) -> Self {
        self.scheme = scheme;
        self
    }
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub functional_id: FunctionalId,
    pub value: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub manifold: ModelManifold,
    pub scheme: ReflectionScheme,
    /// Steps resampled after leaving the coordinate chart.
    pub resampled: usize,
}

impl Estimate {
    /// `|value − target| ≤ k·stderr`.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| crate::Error::Serialization(e.to_string()))
    }
}

/// Mean and standard error (`sd/√N`, unbiased variance) in index order.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).collect::<CompensatedSum>().value();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

struct PathEnd {
    x: f64,
    local_time: f64,
    /// Per-grid-time `∫₀^{s_k}K dr` and `∫₀^{s_k}σ dL`, only when requested.
    k_int: Vec<f64>,
    b_int: Vec<f64>,
    positions: Vec<f64>,
    resampled: usize,
}

#[allow(clippy::too_many_arguments)]
fn run_path(
    stepper: &Stepper<'_>,
    manifold: &ModelManifold,
    potentials: &Potentials,
    x0: f64,
    steps: usize,
    seed: u64,
    index: u64,
    record: bool,
) -> Result<PathEnd> {
    let mut rng = path_rng(seed, index);
    let (lower, upper) = manifold.walls();
    let sig_lo = lower.map(|a| potentials.sigma.at(a)).unwrap_or(0.0);
    let sig_hi = upper.map(|b| potentials.sigma.at(b)).unwrap_or(0.0);
    let dt = stepper.dt();
    let cap = if record { steps + 1 } else { 0 };
    let mut end = PathEnd {
        x: x0,
        local_time: 0.0,
        k_int: Vec::with_capacity(cap),
        b_int: Vec::with_capacity(cap),
        positions: Vec::with_capacity(cap),
        resampled: 0,
    };
    let (mut a, mut b) = (0.0, 0.0);
    if record {
        end.k_int.push(0.0);
        end.b_int.push(0.0);
        end.positions.push(x0);
    }
    for _ in 0..steps {
        let st = stepper.step(end.x, &mut rng)?;
        if record {
            a += potentials.k.at(end.x) * dt;
            b += sig_lo * st.dl_lower + sig_hi * st.dl_upper;
            end.k_int.push(a);
            end.b_int.push(b);
            end.positions.push(st.x);
        }
        end.local_time += st.dl_lower + st.dl_upper;
        end.resampled += st.resampled;
        end.x = st.x;
    }
    Ok(end)
}

fn trapezoid(dt: f64, values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let mut s: CompensatedSum = v[1..n - 1].iter().copied().collect();
    s.add(0.5 * (v[0] + v[n - 1]));
    s.value() * dt
}

/// Estimates a path functional with the manifold's constant potentials.
pub fn estimate_functional(
    manifold: &ModelManifold,
    u0: &InitialDatum,
    x: f64,
    t: f64,
    clock: Option<&Clock>,
    functional: Functional,
    mc: &MonteCarlo,
) -> Result<Estimate> {
    estimate_functional_with(manifold, u0, x, t, clock, functional, mc, &Potentials::from_manifold(manifold))
}

/// Estimates a path functional with explicit `K(·)` and `σ(·)`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_functional_with(
    manifold: &ModelManifold,
    u0: &InitialDatum,
    x: f64,
    t: f64,
    clock: Option<&Clock>,
    functional: Functional,
    mc: &MonteCarlo,
    potentials: &Potentials,
) -> Result<Estimate> {
    if mc.n_paths < 2 {
        return Err(invalid("n_paths", "need at least 2 paths"));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let stepper = Stepper::new(manifold, mc.dt, mc.scheme)?;
    stepper.check_start(x)?;
    let steps = step_count(t, mc.dt);
    if (steps as f64 * mc.dt - t).abs() > 1e-9 * t {
        return Err(invalid("dt", format!("t = {t} is not a multiple of dt = {}", mc.dt)));
    }
    if let Functional::LocalTimeMoment { p } = functional {
        return local_time_moment_inner(manifold, x, t, p, mc, &stepper, steps);
    }
    let needs_clock = matches!(functional, Functional::J0Rhs | Functional::A1Rhs { .. });
    let clock = match (needs_clock, clock) {
        (true, None) => return Err(invalid("clock", format!("{} needs a clock", functional.id()))),
        (true, Some(c)) if (c.horizon() - t).abs() > 1e-9 * t => {
            return Err(invalid("clock", format!("horizon {} differs from t = {t}", c.horizon())))
        }
        (_, c) => c,
    };
    if let Functional::A1Rhs { alpha } = functional {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(invalid("alpha", format!("must exceed 1, got {alpha}")));
        }
        if !clock.expect("checked").is_nonincreasing() {
            return Err(invalid("clock", "the dimension-free form needs a non-increasing clock"));
        }
        if manifold.sigma().is_some_and(|s| s < 0.0) {
            return Err(invalid("sigma", "the dimension-free form needs a convex boundary"));
        }
    }
    let grid: Vec<(f64, f64)> = match clock {
        Some(c) => (0..=steps).map(|k| c.eval(k as f64 * mc.dt)).collect(),
        None => vec![],
    };
    let record = !matches!(functional, Functional::HeatValue | Functional::LocalTime);
    let n = manifold.n();
    let dt = mc.dt;
    let per_path = |i: usize| -> Result<(f64, usize)> {
        let p = run_path(&stepper, manifold, potentials, x, steps, mc.seed, i as u64, record)?;
        let v = match functional {
            Functional::HeatValue => u0.jet(manifold, p.x)?.0,
            Functional::LocalTime => p.local_time,
            Functional::GRhs => {
                let (_, grad, _) = u0.point(manifold, p.x)?;
                grad * (-(p.k_int[steps] + p.b_int[steps])).exp()
            }
            Functional::J0Rhs => {
                let (u, _, lu) = u0.point(manifold, p.x)?;
                let w = |k: usize| (-2.0 * (p.k_int[k] + p.b_int[k])).exp();
                let i1 = trapezoid(dt, (0..=steps).map(|k| grid[k].1 * grid[k].1 * w(k)));
                let i2 = trapezoid(dt, (0..=steps).map(|k| 2.0 * grid[k].0 * grid[k].1 * w(k)));
                0.5 * n * u * i1 - lu * i2
            }
            Functional::A1Rhs { alpha } => {
                let (u, _, _) = u0.point(manifold, p.x)?;
                let q = 1.0 / (alpha - 1.0);
                let i = trapezoid(
                    dt,
                    (0..=steps).map(|k| {
                        let (l, d) = grid[k];
                        let v = potentials.k.at(p.positions[k]) * q * l + d;
                        v * v * (2.0 * q * p.k_int[k]).exp()
                    }),
                );
                0.5 * n * alpha * u * i
            }
            Functional::LocalTimeMoment { .. } => unreachable!("handled above"),
        };
        Ok((v, p.resampled))
    };
    let results: Vec<(f64, usize)> = (0..mc.n_paths).into_par_iter().map(per_path).collect::<Result<_>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let (value, stderr) = mean_and_stderr(&values);
    Ok(Estimate {
        functional_id: functional.id(),
        value,
        stderr,
        n_paths: mc.n_paths,
        dt: mc.dt,
        seed: mc.seed,
        manifold: manifold.clone(),
        scheme: mc.scheme,
        resampled: results.iter().map(|r| r.1).sum(),
    })
}

/// `E[e^{pL_t}]` from `x0`, aggregated in log-sum-exp form.
pub fn local_time_moment(manifold: &ModelManifold, x0: f64, t: f64, p: f64, mc: &MonteCarlo) -> Result<Estimate> {
    if !manifold.has_boundary() {
        return Err(invalid("manifold", format!("{} has no boundary", manifold.family())));
    }
    let stepper = Stepper::new(manifold, mc.dt, mc.scheme)?;
    stepper.check_start(x0)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be >= 0, got {t}")));
    }
    local_time_moment_inner(manifold, x0, t, p, mc, &stepper, step_count(t, mc.dt))
}

fn local_time_moment_inner(
    manifold: &ModelManifold,
    x0: f64,
    _t: f64,
    p: f64,
    mc: &MonteCarlo,
    stepper: &Stepper<'_>,
    steps: usize,
) -> Result<Estimate> {
    if mc.n_paths < 2 {
        return Err(invalid("n_paths", "need at least 2 paths"));
    }
    if !p.is_finite() {
        return Err(invalid("p", "must be finite"));
    }
    let mut estimate = Estimate {
        functional_id: FunctionalId::LocalTimeMoment,
        value: 1.0,
        stderr: 0.0,
        n_paths: mc.n_paths,
        dt: mc.dt,
        seed: mc.seed,
        manifold: manifold.clone(),
        scheme: mc.scheme,
        resampled: 0,
    };
    if p == 0.0 {
        return Ok(estimate);
    }
    let potentials = Potentials::from_manifold(manifold);
    let results: Vec<(f64, usize)> = (0..mc.n_paths)
        .into_par_iter()
        .map(|i| {
            run_path(stepper, manifold, &potentials, x0, steps, mc.seed, i as u64, false)
                .map(|e| (p * e.local_time, e.resampled))
        })
        .collect::<Result<_>>()?;
    let top = results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let scaled: Vec<f64> = results.iter().map(|r| (r.0 - top).exp()).collect();
    let (mean, se) = mean_and_stderr(&scaled);
    estimate.value = top.exp() * mean;
    estimate.stderr = top.exp() * se;
    estimate.resampled = results.iter().map(|r| r.1).sum();
    Ok(estimate)
}
