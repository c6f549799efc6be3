//! Orthogonal polynomials and quadrature weights for the spectral solvers.

use std::f64::consts::PI;

/// Gegenbauer polynomial `C_k^λ(x)` by the three-term recurrence.
pub fn gegenbauer(k: u32, lambda: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, 2.0 * lambda * x);
    for n in 2..=k {
        let n = n as f64;
        let next = (2.0 * x * (n + lambda - 1.0) * cur - (n + 2.0 * lambda - 2.0) * prev) / n;
        prev = cur;
        cur = next;
    }
    cur
}

/// `(C_k^λ, dC_k^λ/dx, d²C_k^λ/dx²)` at `x`.
pub fn gegenbauer_with_derivatives(k: u32, lambda: f64, x: f64) -> (f64, f64, f64) {
    let c = gegenbauer(k, lambda, x);
    let d1 = if k >= 1 { 2.0 * lambda * gegenbauer(k - 1, lambda + 1.0, x) } else { 0.0 };
    let d2 = if k >= 2 { 4.0 * lambda * (lambda + 1.0) * gegenbauer(k - 2, lambda + 2.0, x) } else { 0.0 };
    (c, d1, d2)
}

/// Nodes `r_j = (j + ½)π/M` and weights integrating `f(r)·sin^{m−1}(r)` over
/// `[0, π]` exactly when `f` is a polynomial in `cos r` of degree below `M`.
///
/// Odd `m` reduces to the midpoint rule for a cosine series; even `m` uses
/// Fejér's first rule in `x = cos r`.
pub fn sphere_quadrature(nodes: usize, m: u32) -> (Vec<f64>, Vec<f64>) {
    let mf = nodes as f64;
    let r: Vec<f64> = (0..nodes).map(|j| (j as f64 + 0.5) * PI / mf).collect();
    let w = r
        .iter()
        .map(|&theta| {
            if m % 2 == 1 {
                PI / mf * theta.sin().powi(m as i32 - 1)
            } else {
                let mut s = 0.0;
                for k in 1..=nodes / 2 {
                    let k = k as f64;
                    s += (2.0 * k * theta).cos() / (4.0 * k * k - 1.0);
                }
                2.0 / mf * (1.0 - 2.0 * s) * theta.sin().powi(m as i32 - 2)
            }
        })
        .collect();
    (r, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_special_case() {
        let x: f64 = 0.37;
        assert!((gegenbauer(2, 0.5, x) - (3.0 * x * x - 1.0) / 2.0).abs() < 1e-15);
        assert!((gegenbauer(3, 0.5, x) - (5.0 * x.powi(3) - 3.0 * x) / 2.0).abs() < 1e-15);
        let (_, d, dd) = gegenbauer_with_derivatives(3, 0.5, x);
        assert!((d - (15.0 * x * x - 3.0) / 2.0).abs() < 1e-14);
        assert!((dd - 15.0 * x).abs() < 1e-14);
    }

    #[test]
    fn sphere_quadrature_integrates_volume() {
        // ∫₀^π sin^{m−1} = √π Γ(m/2)/Γ((m+1)/2): 2, π/2, 4/3, 3π/8.
        let expected = [2.0, PI / 2.0, 4.0 / 3.0, 3.0 * PI / 8.0];
        for (i, m) in (2..=5u32).enumerate() {
            let (_, w) = sphere_quadrature(64, m);
            let total: f64 = w.iter().sum();
            assert!((total - expected[i]).abs() < 1e-14, "m={m}");
        }
    }

    #[test]
    fn sphere_quadrature_is_exact_for_polynomials() {
        let (r, w) = sphere_quadrature(32, 2);
        let v: f64 = r.iter().zip(&w).map(|(r, w)| w * r.cos().powi(10)).sum();
        assert!((v - 2.0 / 11.0).abs() < 1e-14);
    }
}
