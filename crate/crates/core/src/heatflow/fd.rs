//! Crank–Nicolson finite differences on the one-dimensional reductions.

use crate::error::{invalid, Error, Result};
use crate::geometry::{Family, ModelManifold};

/// Tridiagonal operator, optionally with periodic corner entries.
///
/// Row `j` reads `lower[j]·u[j−1] + diag[j]·u[j] + upper[j]·u[j+1]`, with
/// indices wrapped when `periodic`.
#[derive(Debug, Clone)]
pub(crate) struct Tridiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub periodic: bool,
}

impl Tridiag {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|j| {
                let left = if j > 0 {
                    u[j - 1]
                } else if self.periodic {
                    u[n - 1]
                } else {
                    0.0
                };
                let right = if j + 1 < n {
                    u[j + 1]
                } else if self.periodic {
                    u[0]
                } else {
                    0.0
                };
                self.lower[j] * left + self.diag[j] * u[j] + self.upper[j] * right
            })
            .collect()
    }

    /// `I + s·A`.
    pub fn shifted(&self, s: f64) -> Tridiag {
        Tridiag {
            lower: self.lower.iter().map(|v| s * v).collect(),
            diag: self.diag.iter().map(|v| 1.0 + s * v).collect(),
            upper: self.upper.iter().map(|v| s * v).collect(),
            periodic: self.periodic,
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if self.periodic {
            solve_cyclic(&self.lower, &self.diag, &self.upper, rhs)
        } else {
            thomas(&self.lower, &self.diag, &self.upper, rhs)
        }
    }
}

/// Thomas algorithm; `lower[0]` and `upper[n−1]` are ignored.
pub(crate) fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    for j in 0..n {
        if j > 0 {
            pivot = diag[j] - lower[j] * c[j - 1];
        }
        if pivot.abs() < 1e-300 {
            return Err(Error::Stability("singular tridiagonal system".into()));
        }
        c[j] = if j + 1 < n { upper[j] / pivot } else { 0.0 };
        d[j] = (rhs[j] - if j > 0 { lower[j] * d[j - 1] } else { 0.0 }) / pivot;
    }
    for j in (0..n.saturating_sub(1)).rev() {
        d[j] -= c[j] * d[j + 1];
    }
    Ok(d)
}

/// Cyclic tridiagonal solve by the Sherman–Morrison correction.
fn solve_cyclic(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n < 3 {
        return Err(invalid("grid_size", "periodic systems need at least 3 nodes"));
    }
    let alpha = lower[0]; // row 0, column n−1
    let beta = upper[n - 1]; // row n−1, column 0
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    let x = thomas(lower, &b, upper, rhs)?;
    let mut v = vec![0.0; n];
    v[0] = gamma;
    v[n - 1] = beta;
    let z = thomas(lower, &b, upper, &v)?;
    let fact = (x[0] + alpha * x[n - 1] / gamma) / (1.0 + z[0] + alpha * z[n - 1] / gamma);
    Ok(x.iter().zip(&z).map(|(x, z)| x - fact * z).collect())
}

/// Discrete generator on the solver grid.
///
/// The circle uses central differences for `u″ + c u′`; every other family
/// uses the flux form `w⁻¹(w u′)′` with zero flux through both ends.
pub(crate) fn generator_matrix(manifold: &ModelManifold, grid: &[f64]) -> Result<Tridiag> {
    let n = grid.len();
    if n < 3 {
        return Err(invalid("grid_size", "need at least 3 nodes"));
    }
    let h = grid[1] - grid[0];
    let h2 = h * h;
    if manifold.family() == Family::Circle {
        let c = manifold.drift().value();
        if c.abs() * h / 2.0 >= 1.0 {
            return Err(Error::Stability(format!("cell Peclet number |c|h/2 = {} must be below 1", c.abs() * h / 2.0)));
        }
        return Ok(Tridiag {
            lower: vec![1.0 / h2 - c / (2.0 * h); n],
            diag: vec![-2.0 / h2; n],
            upper: vec![1.0 / h2 + c / (2.0 * h); n],
            periodic: true,
        });
    }
    let w: Vec<f64> = grid.iter().map(|&x| manifold.weight(x)).collect();
    let face = |j: usize| manifold.weight(grid[j] + h / 2.0);
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for j in 0..n - 1 {
        let f = face(j);
        upper[j] = f / (h2 * w[j]);
        lower[j + 1] = f / (h2 * w[j + 1]);
    }
    let diag = (0..n).map(|j| -(lower[j] + upper[j])).collect();
    Ok(Tridiag { lower, diag, upper, periodic: false })
}

/// Central differences with mirror ghost nodes at the ends.
pub(crate) fn central_gradient(grid: &[f64], u: &[f64], periodic: bool) -> Vec<f64> {
    let n = u.len();
    let h = grid[1] - grid[0];
    (0..n)
        .map(|j| {
            let left = match j {
                0 if periodic => u[n - 1],
                0 => u[0],
                _ => u[j - 1],
            };
            let right = match j {
                _ if j + 1 < n => u[j + 1],
                _ if periodic => u[0],
                _ => u[n - 1],
            };
            (right - left) / (2.0 * h)
        })
        .collect()
}

/// Advances `u` to time `t` with steps of at most the grid spacing.
pub(crate) fn crank_nicolson(op: &Tridiag, grid_step: f64, u0: &[f64], t: f64) -> Result<Vec<f64>> {
    let steps = (t / grid_step).ceil() as usize;
    if steps == 0 {
        return Ok(u0.to_vec());
    }
    let dt = t / steps as f64;
    let left = op.shifted(-dt / 2.0);
    let right = op.shifted(dt / 2.0);
    let mut u = u0.to_vec();
    for _ in 0..steps {
        u = left.solve(&right.apply(&u))?;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_matches_dense_solution() {
        let lower = [0.0, 1.0, 2.0];
        let diag = [4.0, 5.0, 6.0];
        let upper = [1.0, 1.0, 0.0];
        let x = [1.0, -2.0, 3.0];
        let rhs = [4.0 * 1.0 + 1.0 * -2.0, 1.0 + 5.0 * -2.0 + 3.0, 2.0 * -2.0 + 6.0 * 3.0];
        let sol = thomas(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in sol.iter().zip(&x) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn cyclic_solve_inverts_apply() {
        let n = 7;
        let t = Tridiag {
            lower: (0..n).map(|j| -1.0 - 0.1 * j as f64).collect(),
            diag: vec![5.0; n],
            upper: (0..n).map(|j| -0.5 + 0.05 * j as f64).collect(),
            periodic: true,
        };
        let x: Vec<f64> = (0..n).map(|j| (j as f64).sin()).collect();
        let back = t.solve(&t.apply(&x)).unwrap();
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
