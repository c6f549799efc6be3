use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::datum::{generator, DatumKind, InitialDatum, POSITIVITY_FLOOR};
use super::fd::{central_gradient, crank_nicolson, generator_matrix};
use super::kernel::kernel_jet;
use super::special::sphere_quadrature;
use super::spectral::{self, DiscreteBasis, Fields};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Family, ModelManifold};

/// Minimum node count of a spectral solve.
pub const MIN_SPECTRAL_NODES: usize = 64;

/// Tolerance of the per-solve maximum-principle check, relative to `1 + max|u₀|`.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-9;

/// How a [`HeatState`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Eigenfunction expansion (or Gaussian convolution on unbounded families).
    Spectral,
    /// Crank–Nicolson in time, second-order differences in space.
    #[serde(alias = "crank-nicolson-fd", alias = "crank-nicolson")]
    CrankNicolson,
    /// Closed-form heat kernel.
    ExactKernel,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Spectral => "spectral",
            Scheme::CrankNicolson => "crank_nicolson",
            Scheme::ExactKernel => "exact_kernel",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Scheme::Spectral),
            "crank_nicolson" | "crank-nicolson" | "crank-nicolson-fd" | "cn" | "fd" => Ok(Scheme::CrankNicolson),
            "exact_kernel" | "exact" => Ok(Scheme::ExactKernel),
            _ => Err(Error::Unknown { kind: "scheme", name: s.to_string() }),
        }
    }
}

/// Snapshot of `(u_t, ∂u_t, Lu_t)` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatState {
    manifold: ModelManifold,
    t: f64,
    scheme: Scheme,
    grid: Vec<f64>,
    u: Vec<f64>,
    grad_u: Vec<f64>,
    lu: Vec<f64>,
    floor: f64,
    mass: Option<f64>,
    initial_mass: Option<f64>,
    initial_range: Option<(f64, f64)>,
}

impl HeatState {
    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn u(&self) -> &[f64] {
        &self.u
    }
    pub fn grad_u(&self) -> &[f64] {
        &self.grad_u
    }
    pub fn lu(&self) -> &[f64] {
        &self.lu
    }
    pub fn len(&self) -> usize {
        self.grid.len()
    }
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `∫u dμ` by the quadrature native to the scheme, when the scheme
    /// conserves it.
    pub fn mass(&self) -> Option<f64> {
        self.mass
    }
    pub fn initial_mass(&self) -> Option<f64> {
        self.initial_mass
    }

    /// Relative change of the conserved mass.
    pub fn mass_defect(&self) -> Option<f64> {
        match (self.mass, self.initial_mass) {
            (Some(m), Some(m0)) => Some(((m - m0) / m0).abs()),
            _ => None,
        }
    }

    /// `(inf u₀, sup u₀)` as sampled by the solver.
    pub fn initial_range(&self) -> Option<(f64, f64)> {
        self.initial_range
    }

    /// Amount by which `u` leaves `[inf u₀, sup u₀]` (zero when it does not).
    pub fn max_principle_defect(&self) -> Option<f64> {
        let (lo, hi) = self.initial_range?;
        Some(self.u.iter().fold(0.0f64, |d, &u| d.max(lo - u).max(u - hi)))
    }

    /// Index of the node at coordinate `x`.
    pub fn node_index(&self, x: f64) -> Result<usize> {
        let i = self.grid.partition_point(|&g| g < x);
        [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&j| j < self.grid.len())
            .find(|&j| (self.grid[j] - x).abs() <= 1e-9 * (1.0 + x.abs()))
            .ok_or_else(|| invalid("x", format!("{x} is not a grid node")))
    }

    /// `(X, Y, W)` at node `i`.
    pub fn harnack_at(&self, i: usize) -> Result<(f64, f64, f64)> {
        let u = self.u[i];
        if !(u >= self.floor) {
            return Err(Error::Positivity { value: u, coord: self.grid[i] });
        }
        let g2 = self.grad_u[i] * self.grad_u[i];
        Ok((g2 / (u * u), self.lu[i] / u, g2 / u))
    }

    /// Grid values of the state as initial data for a further solve.
    pub fn as_datum(&self) -> InitialDatum {
        InitialDatum {
            kind: DatumKind::Sampled { coords: self.grid.clone(), values: self.u.clone() },
            floor: self.floor,
        }
    }

    /// CSV with a `#` metadata line followed by `coord,u,grad_u,Lu`.
    pub fn to_csv(&self) -> Result<String> {
        let mut buf = format!(
            "# family={},m={},n={},t={},scheme={},grid_size={}\n",
            self.manifold.family(),
            self.manifold.m(),
            self.manifold.n(),
            self.t,
            self.scheme,
            self.grid.len()
        )
        .into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let ser = |e: csv::Error| Error::Serialization(e.to_string());
            w.write_record(["coord", "u", "grad_u", "Lu"]).map_err(ser)?;
            for i in 0..self.grid.len() {
                w.write_record(&[
                    self.grid[i].to_string(),
                    self.u[i].to_string(),
                    self.grad_u[i].to_string(),
                    self.lu[i].to_string(),
                ])
                .map_err(ser)?;
            }
            w.flush().map_err(|e| Error::Serialization(e.to_string()))?;
        }
        String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
        let mut f = std::fs::File::create(path).map_err(io)?;
        f.write_all(self.to_csv()?.as_bytes()).map_err(io)
    }
}

/// `(X, Y, W)` at grid coordinate `x`.
pub fn harnack_quantities(state: &HeatState, x: f64) -> Result<(f64, f64, f64)> {
    state.harnack_at(state.node_index(x)?)
}

/// Solver nodes: `2πj/M` on the circle, cell centres elsewhere.
pub fn solver_grid(manifold: &ModelManifold, grid_size: usize) -> Vec<f64> {
    let (lo, hi) = manifold.domain();
    let m = grid_size as f64;
    match manifold.family() {
        Family::Circle => (0..grid_size).map(|j| std::f64::consts::TAU * j as f64 / m).collect(),
        _ => (0..grid_size).map(|j| lo + (j as f64 + 0.5) * (hi - lo) / m).collect(),
    }
}

fn node_values(
    manifold: &ModelManifold,
    datum: &InitialDatum,
    grid: &[f64],
    basis: Option<&DiscreteBasis>,
) -> Result<Vec<f64>> {
    if let DatumKind::Sampled { coords, values } = &datum.kind {
        let same = coords.len() == grid.len()
            && coords.iter().zip(grid).all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        if same {
            return Ok(values.clone());
        }
    }
    if let (DatumKind::EigenMode { k, amplitude }, true) = (&datum.kind, datum.needs_discrete_basis(manifold)) {
        let owned;
        let basis = match basis {
            Some(b) => b,
            None => {
                owned = DiscreteBasis::new(manifold, grid)?;
                &owned
            }
        };
        return Ok(basis.mode(*k as usize)?.iter().map(|p| 1.0 + amplitude * p).collect());
    }
    grid.iter().map(|&x| datum.jet(manifold, x).map(|j| j.0)).collect()
}

fn initial_range(manifold: &ModelManifold, datum: &InitialDatum, nodes: &[f64]) -> Result<(f64, f64)> {
    let mut lo = nodes.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = nodes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !matches!(datum.kind, DatumKind::Sampled { .. }) && !datum.needs_discrete_basis(manifold) {
        let (a, b) = manifold.domain();
        for i in 0..=4000 {
            let v = datum.jet(manifold, a + (b - a) * i as f64 / 4000.0)?.0;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok((lo, hi))
}

/// Quadrature weights under which the scheme conserves `∫u dμ`.
fn mass_weights(manifold: &ModelManifold, scheme: Scheme, grid: &[f64]) -> Option<Vec<f64>> {
    let family = manifold.family();
    let h = if family == Family::Circle { std::f64::consts::TAU / grid.len() as f64 } else { grid[1] - grid[0] };
    match (scheme, family) {
        (Scheme::Spectral, Family::EuclideanLine | Family::HalfLineNeumann) => None,
        (Scheme::Spectral, Family::SphereRadial) => Some(sphere_quadrature(grid.len(), manifold.m()).1),
        (_, Family::Circle) => Some(vec![h; grid.len()]),
        _ => Some(grid.iter().map(|&x| h * manifold.weight(x)).collect()),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    crate::numeric::sum(&a.iter().zip(b).map(|(x, y)| x * y).collect::<Vec<_>>())
}

/// Solves `∂_t u = Lu` with Neumann (or periodic) conditions from `u0`.
pub fn solve_heat(
    manifold: &ModelManifold,
    u0: &InitialDatum,
    t: f64,
    grid_size: usize,
    scheme: Scheme,
) -> Result<HeatState> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    if grid_size < 3 {
        return Err(invalid("grid_size", "need at least 3 nodes"));
    }
    if scheme == Scheme::Spectral && grid_size < MIN_SPECTRAL_NODES {
        return Err(invalid("grid_size", format!("spectral solves need at least {MIN_SPECTRAL_NODES} nodes")));
    }
    u0.validate(manifold)?;
    let grid = solver_grid(manifold, grid_size);
    let family = manifold.family();
    let basis = match (scheme, family) {
        (Scheme::Spectral, Family::HyperbolicRadial | Family::EuclideanRadial) => {
            Some(DiscreteBasis::new(manifold, &grid)?)
        }
        _ => None,
    };
    let values = node_values(manifold, u0, &grid, basis.as_ref())?;
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= u0.floor)) {
        return Err(Error::Positivity { value: *v, coord: grid[i] });
    }
    let fields = match scheme {
        Scheme::ExactKernel => {
            return Err(invalid("scheme", "exact kernels are evaluated with kernel_state"));
        }
        Scheme::Spectral => match family {
            Family::Circle => spectral::circle(manifold, &values, &grid, t)?,
            Family::IntervalNeumann => spectral::interval(manifold, &values, &grid, t)?,
            Family::SphereRadial => spectral::sphere(manifold, &values, &grid, t)?,
            Family::EuclideanLine | Family::HalfLineNeumann => spectral::convolution(manifold, u0, &grid, t)?,
            Family::HyperbolicRadial | Family::EuclideanRadial => {
                basis.as_ref().expect("basis built above").evolve(&values, t)
            }
        },
        Scheme::CrankNicolson => {
            let op = generator_matrix(manifold, &grid)?;
            let h = grid[1] - grid[0];
            let u = crank_nicolson(&op, h, &values, t)?;
            Fields { grad: central_gradient(&grid, &u, op.periodic), lu: op.apply(&u), u }
        }
    };
    let weights = mass_weights(manifold, scheme, &grid);
    let state = HeatState {
        manifold: manifold.clone(),
        t,
        scheme,
        mass: weights.as_ref().map(|w| dot(w, &fields.u)),
        initial_mass: weights.as_ref().map(|w| dot(w, &values)),
        initial_range: Some(initial_range(manifold, u0, &values)?),
        grid,
        u: fields.u,
        grad_u: fields.grad,
        lu: fields.lu,
        floor: u0.floor,
    };
    if let Some((i, v)) = state.u.iter().enumerate().find(|(_, v)| !(**v >= state.floor)) {
        return Err(Error::Positivity { value: *v, coord: state.grid[i] });
    }
    let (lo, hi) = state.initial_range.expect("set above");
    let slack = MAX_PRINCIPLE_TOL * (1.0 + lo.abs().max(hi.abs()));
    if let Some(d) = state.max_principle_defect().filter(|d| *d > slack) {
        return Err(Error::Stability(format!("maximum principle violated by {d:e}")));
    }
    Ok(state)
}

/// Heat kernel `x ↦ p_t(x, y)` on `grid` with closed-form derivatives.
///
/// For the radial Euclidean family the source must sit at the pole.
pub fn kernel_state(manifold: &ModelManifold, t: f64, y: f64, grid: &[f64]) -> Result<HeatState> {
    if manifold.family() == Family::EuclideanRadial && y != 0.0 {
        return Err(invalid("y", "radial kernels need the source at the pole"));
    }
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("grid", "must be non-empty and strictly increasing"));
    }
    let mut u = Vec::with_capacity(grid.len());
    let mut grad_u = Vec::with_capacity(grid.len());
    let mut lu = Vec::with_capacity(grid.len());
    for &x in grid {
        let (p, dp, ddp) = kernel_jet(manifold, t, x, y)?;
        if !(p >= POSITIVITY_FLOOR) {
            return Err(Error::Positivity { value: p, coord: x });
        }
        u.push(p);
        grad_u.push(dp);
        lu.push(generator(manifold, x, dp, ddp));
    }
    Ok(HeatState {
        manifold: manifold.clone(),
        t,
        scheme: Scheme::ExactKernel,
        grid: grid.to_vec(),
        u,
        grad_u,
        lu,
        floor: POSITIVITY_FLOOR,
        mass: None,
        initial_mass: None,
        initial_range: None,
    })
}
