use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::{mean_and_stderr, MonteCarlo};
use super::path::{simulate_path, PathSample, Potentials};
use crate::error::{invalid, Error, Result};
use crate::geometry::ModelManifold;

/// Cutoff values below which the clock is treated as blown up.
pub const CUTOFF_FLOOR: f64 = 1e-8;

/// `f(y) = cos(π|y − center|/(2R))` inside the ball of radius `R`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub center: f64,
    pub radius: f64,
}

impl Cutoff {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(center.is_finite() && radius.is_finite() && radius > 0.0) {
            return Err(invalid("radius", format!("must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn value(&self, y: f64) -> f64 {
        let rho = (y - self.center).abs();
        if rho >= self.radius {
            0.0
        } else {
            (PI * rho / (2.0 * self.radius)).cos()
        }
    }
}

/// Discrete clock `T(s) = ∫₀ˢ f^{−2}(X_r)dr` of one path and its inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeChange {
    pub times: Vec<f64>,
    /// `T(s_k)`.
    pub clock: Vec<f64>,
    pub positions: Vec<f64>,
    /// `f(X_{s_k})`.
    pub cutoff: Vec<f64>,
    /// First grid time at which the path is outside the domain of `f`.
    pub exit_time: Option<f64>,
    /// Set when `f` dropped below [`CUTOFF_FLOOR`] before a recorded exit.
    pub truncated: bool,
}

impl TimeChange {
    /// Largest `t` for which `τ(t)` is resolved.
    pub fn resolved_horizon(&self) -> f64 {
        *self.clock.last().expect("non-empty clock")
    }

    /// `T(s)` by linear interpolation.
    pub fn clock_at(&self, s: f64) -> Result<f64> {
        let last = *self.times.last().expect("non-empty");
        if !(s >= 0.0 && s <= last) {
            return Err(Error::OutOfDomain(format!("s = {s} outside [0, {last}]")));
        }
        let dt = self.times.get(1).map_or(1.0, |t1| t1 - self.times[0]);
        let k = ((s / dt).floor() as usize).min(self.times.len().saturating_sub(2));
        if self.times.len() < 2 {
            return Ok(0.0);
        }
        let w = (s - self.times[k]) / dt;
        Ok(self.clock[k] + w * (self.clock[k + 1] - self.clock[k]))
    }

    /// `τ(t) = T⁻¹(t)` and the interpolation weight locating it in its step.
    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let top = self.resolved_horizon();
        if !(t >= 0.0 && t <= top) {
            return Err(Error::OutOfDomain(format!("t = {t} beyond the resolved clock {top}")));
        }
        if self.clock.len() < 2 {
            return Ok((0, 0.0));
        }
        let k = self.clock.partition_point(|&c| c <= t).saturating_sub(1).min(self.clock.len() - 2);
        let span = self.clock[k + 1] - self.clock[k];
        Ok((k, ((t - self.clock[k]) / span).clamp(0.0, 1.0)))
    }

    pub fn tau(&self, t: f64) -> Result<f64> {
        let (k, w) = self.locate(t)?;
        let dt = self.times.get(1).map_or(0.0, |t1| t1 - self.times[0]);
        Ok(self.times[k] + w * dt)
    }

    /// `X_{τ(t)}` by linear interpolation.
    pub fn position_at(&self, t: f64) -> Result<f64> {
        let (k, w) = self.locate(t)?;
        match self.positions.get(k + 1) {
            Some(next) => Ok(self.positions[k] + w * (next - self.positions[k])),
            None => Ok(self.positions[k]),
        }
    }
}

/// Builds the time change of `sample` for the cutoff `f`.
pub fn time_change(sample: &PathSample, f: impl Fn(f64) -> f64) -> Result<TimeChange> {
    let mut tc = TimeChange {
        times: vec![],
        clock: vec![],
        positions: vec![],
        cutoff: vec![],
        exit_time: None,
        truncated: false,
    };
    let mut clock = 0.0;
    for (k, (&s, &x)) in sample.times.iter().zip(&sample.positions).enumerate() {
        let fx = f(x);
        if !(fx <= 1.0 + 1e-12) {
            return Err(invalid("f", format!("cutoff value {fx} exceeds 1 at {x}")));
        }
        if fx <= 0.0 {
            tc.exit_time = Some(s);
            break;
        }
        if fx < CUTOFF_FLOOR {
            tc.truncated = true;
            break;
        }
        tc.times.push(s);
        tc.clock.push(clock);
        tc.positions.push(x);
        tc.cutoff.push(fx);
        if k + 1 < sample.times.len() {
            clock += sample.dt / (fx * fx);
        }
    }
    if tc.times.is_empty() {
        return Err(invalid("sample", "the path starts outside the domain of the cutoff"));
    }
    Ok(tc)
}

/// `Ê[f^{−2}(X_{τ(s)})]` against the caller's bound `e^{K_f s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffMoment {
    pub s: f64,
    pub value: f64,
    pub stderr: f64,
    pub bound: f64,
    /// Paths whose clock did not reach `s` (exit between grid times).
    pub unresolved: usize,
}

impl CutoffMoment {
    pub fn holds(&self, k_se: f64) -> bool {
        self.value <= self.bound + k_se * self.stderr
    }
}

/// Estimates the cutoff moments of the time-changed diffusion started at the
/// cutoff centre.
pub fn cutoff_moments(
    manifold: &ModelManifold,
    cutoff: Cutoff,
    s_values: &[f64],
    k_f: f64,
    mc: &MonteCarlo,
) -> Result<Vec<CutoffMoment>> {
    let horizon = s_values.iter().copied().fold(0.0, f64::max);
    if horizon <= 0.0 {
        return Err(invalid("s_values", "need a positive time"));
    }
    let potentials = Potentials::from_manifold(manifold);
    // τ(s) ≤ s, so simulating to the largest s covers every request.
    let per_path: Vec<Vec<Option<f64>>> = (0..mc.n_paths)
        .into_par_iter()
        .map(|i| -> Result<Vec<Option<f64>>> {
            let p = simulate_path(manifold, cutoff.center, horizon, mc.dt, mc.seed, i as u64, mc.scheme, &potentials)?;
            let tc = time_change(&p, |y| cutoff.value(y))?;
            Ok(s_values
                .iter()
                .map(|&s| tc.position_at(s).ok().map(|y| cutoff.value(y)).filter(|f| *f > 0.0).map(|f| f.powi(-2)))
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(s_values
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let vals: Vec<f64> = per_path.iter().filter_map(|v| v[j]).collect();
            let (value, stderr) = if vals.len() >= 2 { mean_and_stderr(&vals) } else { (f64::NAN, f64::NAN) };
            CutoffMoment { s, value, stderr, bound: (k_f * s).exp(), unresolved: mc.n_paths - vals.len() }
        })
        .collect())
}
