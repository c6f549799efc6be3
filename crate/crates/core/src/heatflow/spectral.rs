//! Spectral solvers: Fourier and Gegenbauer expansions, a discrete eigenbasis
//! for the radial families without closed-form eigenfunctions, and Gaussian
//! convolution on the line and half-line.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, SymmetricEigen};

use super::datum::{eigenfunction_jet, eigenvalue, InitialDatum};
use super::fd::{central_gradient, generator_matrix, Tridiag};
use super::special::sphere_quadrature;
use crate::error::{Error, Result};
use crate::geometry::{Family, ModelManifold};
use crate::quadrature::Quadrature;

/// Relative size of the retained high modes above which the expansion is
/// considered truncated.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Node values of `u`, `∂u` and `Lu`.
pub struct Fields {
    pub u: Vec<f64>,
    pub grad: Vec<f64>,
    pub lu: Vec<f64>,
}

fn check_tail(coefficients: impl Iterator<Item = (usize, f64)>, first_tail: usize) -> Result<()> {
    let mut scale = 0.0f64;
    let mut tail = 0.0f64;
    for (k, c) in coefficients {
        scale = scale.max(c.abs());
        if k >= first_tail {
            tail = tail.max(c.abs());
        }
    }
    if tail > TAIL_TOLERANCE * scale {
        return Err(Error::Truncation { tail: tail / scale });
    }
    Ok(())
}

/// Fourier series on the circle with nodes `2πj/M`.
pub(crate) fn circle(manifold: &ModelManifold, values: &[f64], grid: &[f64], t: f64) -> Result<Fields> {
    let n = values.len();
    let c = manifold.drift().value();
    let kmax = (n - 1) / 2;
    let mut a = vec![0.0; kmax + 1];
    let mut b = vec![0.0; kmax + 1];
    for k in 0..=kmax {
        for (j, v) in values.iter().enumerate() {
            let (s, co) = (k as f64 * TAU * j as f64 / n as f64).sin_cos();
            a[k] += v * co;
            b[k] += v * s;
        }
        let norm = if k == 0 { 1.0 } else { 2.0 } / n as f64;
        a[k] *= norm;
        b[k] *= norm;
    }
    let nyquist = if n.is_multiple_of(2) {
        values.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -*v }).sum::<f64>() / n as f64
    } else {
        0.0
    };
    let decayed = |k: usize| (-((k * k) as f64) * t).exp();
    check_tail(
        (0..=kmax)
            .map(|k| (k, a[k].hypot(b[k]) * decayed(k)))
            .chain(std::iter::once((kmax + 1, nyquist * decayed(n / 2)))),
        kmax / 2,
    )?;
    let mut out = Fields { u: vec![], grad: vec![], lu: vec![] };
    for &theta in grid {
        let phase = theta + c * t;
        let (mut u, mut du, mut ddu) = (0.0, 0.0, 0.0);
        for k in 0..=kmax {
            let kf = k as f64;
            let e = decayed(k);
            let (s, co) = (kf * phase).sin_cos();
            u += e * (a[k] * co + b[k] * s);
            du += e * kf * (b[k] * co - a[k] * s);
            ddu -= e * kf * kf * (a[k] * co + b[k] * s);
        }
        out.u.push(u);
        out.grad.push(du);
        out.lu.push(ddu + c * du);
    }
    Ok(out)
}

/// Neumann cosine series on `[0, ℓ]` with cell-centred nodes.
pub(crate) fn interval(manifold: &ModelManifold, values: &[f64], grid: &[f64], t: f64) -> Result<Fields> {
    if !manifold.drift().is_zero() {
        return Err(Error::Unsupported("spectral interval solve with drift; use crank_nicolson".into()));
    }
    let n = values.len();
    let l = manifold.length();
    let omega = |k: usize| k as f64 * PI / l;
    let coeffs: Vec<f64> = (0..n)
        .map(|k| {
            let s: f64 =
                values.iter().enumerate().map(|(j, v)| v * (k as f64 * PI * (j as f64 + 0.5) / n as f64).cos()).sum();
            s * if k == 0 { 1.0 } else { 2.0 } / n as f64
        })
        .collect();
    let decayed: Vec<f64> = (0..n).map(|k| coeffs[k] * (-omega(k).powi(2) * t).exp()).collect();
    check_tail(decayed.iter().copied().enumerate(), n / 2)?;
    let mut out = Fields { u: vec![], grad: vec![], lu: vec![] };
    for &x in grid {
        let (mut u, mut du, mut ddu) = (0.0, 0.0, 0.0);
        for (k, a) in decayed.iter().enumerate() {
            let w = omega(k);
            let (s, co) = (w * x).sin_cos();
            u += a * co;
            du -= a * w * s;
            ddu -= a * w * w * co;
        }
        out.u.push(u);
        out.grad.push(du);
        out.lu.push(ddu);
    }
    Ok(out)
}

/// Zonal Gegenbauer expansion on the sphere, exact for polynomial data in
/// `cos r` of degree below `M/2`.
pub(crate) fn sphere(manifold: &ModelManifold, values: &[f64], grid: &[f64], t: f64) -> Result<Fields> {
    let n = values.len();
    let (nodes, weights) = sphere_quadrature(n, manifold.m());
    let kmax = (n - 1) / 2;
    let mut decayed = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax as u32 {
        let (mut num, mut den) = (0.0, 0.0);
        for ((r, w), v) in nodes.iter().zip(&weights).zip(values) {
            let phi = eigenfunction_jet(manifold, k, *r)?.0;
            num += w * v * phi;
            den += w * phi * phi;
        }
        decayed.push(num / den * (-eigenvalue(manifold, k)? * t).exp());
    }
    check_tail(decayed.iter().copied().enumerate(), kmax / 2)?;
    let mut out = Fields { u: vec![], grad: vec![], lu: vec![] };
    for &r in grid {
        let (mut u, mut du, mut lu) = (0.0, 0.0, 0.0);
        for (k, a) in decayed.iter().enumerate() {
            let (p, dp, _) = eigenfunction_jet(manifold, k as u32, r)?;
            u += a * p;
            du += a * dp;
            lu -= a * eigenvalue(manifold, k as u32)? * p;
        }
        out.u.push(u);
        out.grad.push(du);
        out.lu.push(lu);
    }
    Ok(out)
}

/// Eigenbasis of the symmetrized flux-form generator.
pub struct DiscreteBasis {
    op: Tridiag,
    /// Eigenvalues of `−A`, ascending.
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
    sqrt_w: Vec<f64>,
    grid: Vec<f64>,
}

impl DiscreteBasis {
    pub fn new(manifold: &ModelManifold, grid: &[f64]) -> Result<Self> {
        let op = generator_matrix(manifold, grid)?;
        let n = grid.len();
        let w: Vec<f64> = grid.iter().map(|&x| manifold.weight(x)).collect();
        let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let mut s = DMatrix::zeros(n, n);
        for j in 0..n {
            s[(j, j)] = -op.diag[j];
            if j + 1 < n {
                let off = -op.upper[j] * sqrt_w[j] / sqrt_w[j + 1];
                s[(j, j + 1)] = off;
                s[(j + 1, j)] = off;
            }
        }
        let eig = SymmetricEigen::new(s);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { op, eigenvalues, vectors, sqrt_w, grid: grid.to_vec() })
    }

    /// Eigenvalue of `−A` for mode `k` (mode 0 is the constant).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// Mode `k` at the nodes, scaled to `max|ψ| = 1` and positive at the
    /// first node.
    pub fn mode(&self, k: usize) -> Result<Vec<f64>> {
        if k >= self.grid.len() {
            return Err(crate::error::invalid("k", format!("only {} discrete modes", self.grid.len())));
        }
        let psi: Vec<f64> = (0..self.grid.len()).map(|j| self.vectors[(j, k)] / self.sqrt_w[j]).collect();
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sign = if psi[0] < 0.0 { -1.0 } else { 1.0 };
        Ok(psi.iter().map(|v| sign * v / peak).collect())
    }

    pub fn evolve(&self, values: &[f64], t: f64) -> Fields {
        let n = values.len();
        // The constant is carried exactly; only the deviation is expanded.
        let w: Vec<f64> = self.sqrt_w.iter().map(|s| s * s).collect();
        let mean = values.iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / w.iter().sum::<f64>();
        let y: Vec<f64> = values.iter().zip(&self.sqrt_w).map(|(v, s)| (v - mean) * s).collect();
        let mut z = vec![0.0; n];
        for k in 1..n {
            let col = self.vectors.column(k);
            let coef: f64 = col.iter().zip(&y).map(|(a, b)| a * b).sum();
            let coef = coef * (-self.eigenvalues[k] * t).exp();
            for j in 0..n {
                z[j] += coef * col[j];
            }
        }
        let u: Vec<f64> = z.iter().zip(&self.sqrt_w).map(|(v, s)| mean + v / s).collect();
        Fields { grad: central_gradient(&self.grid, &u, false), lu: self.op.apply(&u), u }
    }
}

/// `E[ũ₀(x + ct + √(2t)Z)]` with the even extension on the half-line.
pub(crate) fn convolution(manifold: &ModelManifold, datum: &InitialDatum, grid: &[f64], t: f64) -> Result<Fields> {
    let half = manifold.family() == Family::HalfLineNeumann;
    if half && !manifold.drift().is_zero() {
        return Err(Error::Unsupported("half-line convolution with drift".into()));
    }
    if matches!(datum.kind, super::datum::DatumKind::Sampled { .. }) {
        return Err(Error::Unsupported("sampled data on an unbounded family; use crank_nicolson".into()));
    }
    let c = manifold.drift().value();
    let extended = |y: f64| -> Result<(f64, f64, f64)> {
        if half {
            let (u, du, ddu) = datum.jet(manifold, y.abs())?;
            Ok((u, y.signum() * du, ddu))
        } else {
            datum.jet(manifold, y)
        }
    };
    let quad = Quadrature::with_tol(1e-13, 0.0);
    let scale = (2.0 * t).sqrt();
    let density = |z: f64| (-z * z / 2.0).exp() / (TAU).sqrt();
    let cuts = [-39.0, -6.0, 0.0, 6.0, 39.0];
    let mut out = Fields { u: vec![], grad: vec![], lu: vec![] };
    for &x in grid {
        let mut moments = [0.0; 3];
        for (slot, moment) in moments.iter_mut().enumerate() {
            let mut failure = None;
            for w in cuts.windows(2) {
                let r = quad.integrate(
                    |z| match extended(x + c * t + scale * z) {
                        Ok(j) => density(z) * [j.0, j.1, j.2][slot],
                        Err(e) => {
                            failure.get_or_insert(e);
                            0.0
                        }
                    },
                    w[0],
                    w[1],
                )?;
                *moment += r.value;
            }
            if let Some(e) = failure {
                return Err(e);
            }
        }
        out.u.push(moments[0]);
        out.grad.push(moments[1]);
        out.lu.push(moments[2] + c * moments[1]);
    }
    Ok(out)
}
