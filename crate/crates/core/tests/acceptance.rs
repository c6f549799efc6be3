//! Acceptance criteria, one test per criterion.
//!
//! Run with `cargo test -p liyau-core --test acceptance -- --nocapture --test-threads 1`
//! to see one `PASS`/`FAIL` line per criterion.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use liyau_core::bounds::{
    beta_eps_radius, beta_t_alpha, beta_tilde_radius, gamma_t_alpha, make_clock, nonconvex_bound_rhs,
    nonconvex_constants, phi_bbg, BoundId, ClockFamily, NonconvexInputs, NonconvexMode,
};
use liyau_core::harness::{run_experiment, BoundSpec, ExperimentConfig, Report};
use liyau_core::heatflow::{kernel_state, solve_heat, InitialDatum, Scheme};
use liyau_core::numeric::x_coth;
use liyau_core::stochastic::{estimate_functional, estimate_functional_with, Functional, MonteCarlo, Potentials};
use liyau_core::{make_model_manifold, Drift, Error, Family, ModelManifold};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, name: &str, pass: bool, elapsed: Duration, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} [{id:>2}] {name} ({:.2}s): {detail}", elapsed.as_secs_f64());
}

fn model(f: Family, m: u32) -> ModelManifold {
    make_model_manifold(f, m, m as f64, Drift::None).unwrap()
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

fn report_summary(r: &Report) -> String {
    let asserted = r.rows.iter().filter(|x| x.margin.is_some()).count();
    let worst = r.summary.worst_margin.values().copied().fold(f64::INFINITY, f64::min);
    format!(
        "{} rows, {asserted} asserted, {} outside domain, {} failed, {} errors, worst margin {worst:.3e}",
        r.summary.bound_rows, r.summary.skipped_rows, r.summary.failed_rows, r.summary.error_rows
    )
}

#[test]
fn criterion_01_gaussian_saturation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for (family, m) in [(Family::EuclideanLine, 1u32), (Family::EuclideanRadial, 2)] {
        let manifold = model(family, m);
        let n = m as f64;
        for _ in 0..100 {
            let t = rng.random_range(0.05..=2.0);
            let x = match family {
                Family::EuclideanLine => rng.random_range(-2.0..=2.0),
                _ => rng.random_range(1e-6..=2.0),
            };
            let s = kernel_state(&manifold, t, 0.0, &[x]).unwrap();
            let (hx, hy, _) = s.harnack_at(0).unwrap();
            worst = worst.max((hx - hy - n / (2.0 * t)).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(1);
    verdict(1, "Gaussian saturation", pass, elapsed, format!("max |X - Y - n/(2t)| = {worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_02_inequality_suite() {
    let start = Instant::now();
    let mut config = ExperimentConfig::from_json(include_str!("../../../configs/suite.json")).unwrap();
    config.output = None;
    let report = run_experiment(&config).unwrap();
    let elapsed = start.elapsed();
    let covered = BoundId::ALL
        .iter()
        .filter(|id| config.bounds.iter().any(|b| b.id == **id))
        .all(|id| report.rows.iter().any(|r| r.bound_id == *id && r.margin.is_some()));
    let pass = report.summary.failed_rows == 0
        && report.summary.error_rows == 0
        && report.summary.solve_errors == 0
        && covered
        && elapsed < Duration::from_secs(300);
    verdict(2, "inequality suite", pass, elapsed, report_summary(&report));
    assert!(pass, "{:?}", report.rows.iter().find(|r| !r.pass));
}

#[test]
fn criterion_03_phi_properties() {
    let start = Instant::now();
    let mut near_zero = 0.0f64;
    let mut sign_ok = true;
    let mut error_edge_ok = true;
    for &k in &[0.25, 0.5, 1.0, 2.0, 4.0] {
        for &t in &[0.05, 0.1, 0.5, 1.0, 2.0, 3.0] {
            for r in [1e-10, -1e-10] {
                near_zero = near_zero.max((phi_bbg(k, t, r).unwrap() - 1.0 / t).abs());
            }
            let edge = -(PI * PI) / (k * k * t * t);
            for i in 0..1000 {
                let r = edge * 0.999 + (2.0 * edge.abs() + 5.0) * i as f64 / 999.0;
                let v = phi_bbg(k, t, r).unwrap();
                if (r >= 0.0 && v < 1.0 / t) || (r <= 0.0 && v > 1.0 / t) {
                    sign_ok = false;
                }
            }
            let above = edge + edge.abs() * 1e-12;
            error_edge_ok &= matches!(phi_bbg(k, t, edge), Err(Error::OutOfDomain(_)));
            error_edge_ok &= matches!(phi_bbg(k, t, edge * 1.5), Err(Error::OutOfDomain(_)));
            error_edge_ok &= phi_bbg(k, t, above).is_ok();
        }
    }
    let pass = near_zero < 1e-6 && sign_ok && error_edge_ok;
    verdict(
        3,
        "Phi properties",
        pass,
        start.elapsed(),
        format!("max |Phi(±1e-10) - 1/t| = {near_zero:.2e}, ordering {sign_ok}, domain edge {error_edge_ok}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_bbg_domain() {
    let start = Instant::now();
    let sphere = model(Family::SphereRadial, 2);
    let (n, k) = (sphere.n(), sphere.k());
    let mut worst = f64::NEG_INFINITY;
    for datum in [InitialDatum::eigenmode(1, 0.5), InitialDatum::eigenmode(2, 0.25)] {
        for &t in &[0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0] {
            let s = solve_heat(&sphere, &datum, t, 96, Scheme::Spectral).unwrap();
            let limit = 1.0 + PI * PI / (k * k * t * t);
            for i in 0..s.len() {
                let (_, y, _) = s.harnack_at(i).unwrap();
                worst = worst.max(4.0 / (n * k) * y - limit);
            }
        }
    }
    let pass = worst < 0.0;
    verdict(4, "BBG domain", pass, start.elapsed(), format!("max of 4Y/(nK) - (1 + pi^2/(K^2 t^2)) = {worst:.3e}"));
    assert!(pass);
}

#[test]
fn criterion_05_beta_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 1000 {
        let k = rng.random_range(0.05..=3.0);
        let t = rng.random_range(0.05..=3.0);
        let alpha = rng.random_range(1.0..=5.0);
        let Ok(b) = beta_t_alpha(k, t, alpha) else { continue };
        let residual = b * b + 16.0 / (3.0 * PI) * b + 1.0 - (1.0 + alpha) / (k * t);
        worst = worst.max(residual.abs());
        count += 1;
    }
    let pass = worst <= 1e-12;
    verdict(5, "beta identity", pass, start.elapsed(), format!("max residual {worst:.2e} over {count} draws"));
    assert!(pass);
}

#[test]
fn criterion_06_gamma_lower_bound() {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for i in 0..10 {
        let k = [-2.0, -1.5, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 1.5, 2.0][i];
        for j in 0..10 {
            let t = 0.05 + (3.0 - 0.05) * j as f64 / 9.0;
            for a in 1..=10 {
                let alpha = 1.0 + 0.4 * a as f64;
                let clock = make_clock(ClockFamily::ExpIntegral { alpha, k }, t).unwrap();
                let g = gamma_t_alpha(&clock, alpha, k).unwrap();
                worst = worst.min(g - (1.0 / alpha - 1.0));
                count += 1;
            }
        }
    }
    let pass = worst > 0.0;
    verdict(
        6,
        "gamma lower bound",
        pass,
        start.elapsed(),
        format!("min gamma - (1/alpha - 1) = {worst:.3e} over {count}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_ne_improves_ly1() {
    let start = Instant::now();
    let mut worst = f64::INFINITY;
    let mut oracle_gap = 0.0f64;
    for i in 0..10 {
        let k = -3.0 + 2.9 * i as f64 / 9.0;
        for j in 1..=10 {
            let alpha = 1.0 + 0.3 * j as f64;
            for l in 1..=10 {
                let t = 0.3 * l as f64;
                let z = k * t / (2.0 * (alpha - 1.0));
                let lhs = (alpha - 1.0) / (2.0 * t) * x_coth(z);
                let direct = k / 4.0 / z.tanh();
                oracle_gap = oracle_gap.max(((lhs - direct) / direct).abs());
                let rhs = (-k).max(0.0) / 2.0 + (alpha - 1.0) / (2.0 * t);
                worst = worst.min(rhs - lhs);
            }
        }
    }
    let pass = worst > 0.0 && oracle_gap < 1e-12;
    verdict(
        7,
        "NE improves LY1",
        pass,
        start.elapsed(),
        format!("min gap {worst:.3e}, coth oracle rel diff {oracle_gap:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_local_time_oracle() {
    let start = Instant::now();
    let half = model(Family::HalfLineNeumann, 1);
    let mc = MonteCarlo::new(100_000, 1e-4, 8);
    let e =
        estimate_functional(&half, &InitialDatum::constant(1.0), 0.0, 1.0, None, Functional::LocalTime, &mc).unwrap();
    let elapsed = start.elapsed();
    let target = 2.0 / PI.sqrt();
    let pass = e.agrees_with(target, 3.0) && elapsed < Duration::from_secs(120);
    verdict(
        8,
        "local-time oracle",
        pass,
        elapsed,
        format!(
            "E[L_1] = {:.5} ± {:.5}, target {target:.5}, z = {:.2}",
            e.value,
            e.stderr,
            (e.value - target) / e.stderr
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_mc_quadrature_agreement() {
    let start = Instant::now();
    let interval = make_model_manifold(Family::IntervalNeumann, 1, 1.0, Drift::None).unwrap().with_length(PI).unwrap();
    let datum = InitialDatum::eigenmode(1, 0.5);
    let (x, t, n) = (0.8f64, 0.7f64, 1.0);
    // Heat flow of 1 + ½cos x on [0, π].
    let u = 1.0 + 0.5 * (-t).exp() * x.cos();
    let lu = -0.5 * (-t).exp() * x.cos();
    let mc = MonteCarlo::new(100_000, 1e-3, 9);
    let mut lines = vec![];
    let mut pass = true;
    for k in [0.0, 0.5, -0.5] {
        for (label, family) in [("linear", ClockFamily::Linear), ("trig", ClockFamily::Trig { a: 0.3, k })] {
            let ell = |s: f64| -> (f64, f64) {
                match family {
                    ClockFamily::Linear => ((t - s) / t, -1.0 / t),
                    _ => {
                        let (c, sn) = ((PI * s / (2.0 * t)).cos(), (PI * s / t).sin());
                        let (dc, dsn) = (-PI / (2.0 * t) * (PI * s / (2.0 * t)).sin(), PI / t * (PI * s / t).cos());
                        let g = c + 0.3 * sn;
                        let e = (k * s).exp();
                        (e * g, e * (k * g + dc + 0.3 * dsn))
                    }
                }
            };
            let derivsq = simpson(|s| ell(s).1.powi(2) * (-2.0 * k * s).exp(), 0.0, t, 4000);
            let sqprime = simpson(|s| 2.0 * ell(s).0 * ell(s).1 * (-2.0 * k * s).exp(), 0.0, t, 4000);
            let target = n / 2.0 * u * derivsq - lu * sqprime;
            let clock = make_clock(family, t).unwrap();
            let e = estimate_functional_with(
                &interval,
                &datum,
                x,
                t,
                Some(&clock),
                Functional::J0Rhs,
                &mc,
                &Potentials::constant(k, 0.0),
            )
            .unwrap();
            let ok = e.agrees_with(target, 3.0);
            pass &= ok;
            lines.push(format!("K={k} {label}: z={:.2}", (e.value - target) / e.stderr.max(1e-300)));
        }
    }
    verdict(9, "MC/quadrature agreement", pass, start.elapsed(), lines.join(", "));
    assert!(pass);
}

#[test]
fn criterion_10_probabilistic_inequalities() {
    let start = Instant::now();
    let interval = make_model_manifold(Family::IntervalNeumann, 1, 1.0, Drift::None).unwrap().with_length(PI).unwrap();
    let half = model(Family::HalfLineNeumann, 1);
    let cases = [(interval, InitialDatum::eigenmode(1, 0.5)), (half, InitialDatum::gaussian_bump(0.8, 1.0))];
    let mc = MonteCarlo::new(20_000, 1e-3, 10);
    let mut pass = true;
    let mut lines = vec![];
    for (m, datum) in &cases {
        for &t in &[0.25, 1.0] {
            let s = solve_heat(m, datum, t, 96, Scheme::Spectral).unwrap();
            let clock = make_clock(ClockFamily::Linear, t).unwrap();
            for &i in &[10usize, 40, 70] {
                let x = s.grid()[i];
                let (_, _, w) = s.harnack_at(i).unwrap();
                let grad = s.grad_u()[i].abs();
                let j0 = estimate_functional(m, datum, x, t, Some(&clock), Functional::J0Rhs, &mc).unwrap();
                let g = estimate_functional(m, datum, x, t, None, Functional::GRhs, &mc).unwrap();
                let ok_j = w <= j0.value + 3.0 * j0.stderr;
                let ok_g = grad <= g.value + 3.0 * g.stderr;
                pass &= ok_j && ok_g;
                if !(ok_j && ok_g) {
                    lines.push(format!(
                        "{} t={t} x={x:.3}: W={w:.4} J0={:.4} |grad|={grad:.4} G={:.4}",
                        m.family(),
                        j0.value,
                        g.value
                    ));
                }
            }
        }
    }
    let detail = if lines.is_empty() { "all 24 checks hold".to_string() } else { lines.join("; ") };
    verdict(10, "probabilistic inequalities", pass, start.elapsed(), detail);
    assert!(pass);
}

#[test]
fn criterion_11_nonconvex_constants() {
    let start = Instant::now();
    let hand =
        NonconvexInputs { k: 0.0, theta: 1.0, sigma: -1.0, r0: 0.5, d: 2, zrho_norm: 0.0, curvature: 0.0, n: 2.0 };
    let c = nonconvex_constants(hand).unwrap();
    let hand_err = (c.delta - 4.0).abs().max((c.kappa - 1.25).abs()).max((c.gamma - 1.0).abs());

    // Curved collar: constants by nested Simpson, coefficients by Simpson.
    let curved =
        NonconvexInputs { k: 0.8, theta: 0.6, sigma: -0.7, r0: 0.4, d: 3, zrho_norm: 0.5, curvature: -0.3, n: 3.0 };
    let data = nonconvex_constants(curved).unwrap();
    let rk = curved.k.sqrt();
    let h = |s: f64| (rk * s).cos() - curved.theta / rk * (rk * s).sin();
    let g = |s: f64| h(s) - h(curved.r0);
    let p = curved.d as i32 - 1;
    let mass = simpson(|s| g(s).powi(p), 0.0, curved.r0, 2000);
    let top = (1.0 - h(curved.r0)).powi(p);
    let delta = -curved.sigma * top / mass;
    let outer = simpson(|s| simpson(|r| g(r).powi(p), s, curved.r0, 400) / g(s).powi(p), 0.0, curved.r0, 400);
    let kappa = 1.0 + delta * outer;
    let gamma = delta * mass / top;
    let k_phi = -2.0 * (curved.curvature - delta + curved.sigma * curved.zrho_norm);
    let const_err = [
        (data.delta - delta) / delta,
        (data.kappa - kappa) / kappa,
        (data.gamma - gamma) / gamma,
        (data.k_phi - k_phi) / k_phi,
    ]
    .iter()
    .fold(0.0f64, |a, v| a.max(v.abs()));

    let t = 0.8;
    let (eps, alpha) = (0.5, 3.0);
    let clock = make_clock(ClockFamily::Linear, t).unwrap();
    let ell = |s: f64| ((t - s) / t, -1.0 / t);
    let k2 = data.kappa * data.kappa;
    let mut coeff_err = 0.0f64;

    let dim = nonconvex_bound_rhs(&data, &clock, eps, None, NonconvexMode::Dimensional).unwrap();
    let rate = eps - data.k_phi;
    let a = 2.0 * simpson(|s| ell(s).0 * ell(s).1.abs() * (rate * s).exp(), 0.0, t, 4000);
    let c1 =
        (curved.n / 2.0 + data.gamma.powi(2) / eps) * simpson(|s| ell(s).1.powi(2) * (rate * s).exp(), 0.0, t, 4000);
    for (got, want) in [(dim.lhs_coeff, 1.0 / k2), (dim.a, a), (dim.c, c1)] {
        coeff_err = coeff_err.max(((got - want) / want).abs());
    }

    let free = nonconvex_bound_rhs(&data, &clock, eps, Some(alpha), NonconvexMode::DimensionFree).unwrap();
    let km = (-curved.curvature).max(0.0);
    let kap = -2.0 * k2 * (data.delta - curved.sigma * curved.zrho_norm + km) / (alpha - k2);
    let rate = kap + data.k_phi - eps;
    let gam = 2.0 * (alpha / k2 - 1.0) * simpson(|s| (ell(s).0 * ell(s).1).abs() * (rate * s).exp(), 0.0, t, 4000);
    let shift = kap - eps;
    let i2 = simpson(|s| (shift * s).exp() * (shift * ell(s).0 + 2.0 * ell(s).1).powi(2), 0.0, t, 4000);
    let c2 = i2 * (curved.n * alpha * alpha / 8.0 + alpha * alpha * data.gamma.powi(2) / (4.0 * eps * (alpha - k2)));
    for (got, want) in [(free.lhs_coeff, 1.0 + gam), (free.a, alpha), (free.c, c2)] {
        coeff_err = coeff_err.max(((got - want) / want).abs());
    }

    let pass = hand_err <= 1e-10 && const_err <= 1e-9 && coeff_err <= 1e-9;
    verdict(
        11,
        "non-convex constants",
        pass,
        start.elapsed(),
        format!("hand case {hand_err:.1e}, curved constants {const_err:.1e}, coefficients {coeff_err:.1e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_12_local_bounds() {
    let start = Instant::now();
    let half_pi = PI / 2.0;
    let b1 = beta_eps_radius(2.0, 0.0, half_pi, 1.0).unwrap();
    let b2 = beta_tilde_radius(2.0, 0.0, half_pi, 2.0).unwrap();
    let exact = (b1 - 16.0).abs() < 1e-12 && (b2 - 16.0).abs() < 1e-12;

    let mut config = ExperimentConfig::from_json(
        r#"{
            "name": "local-bounds",
            "manifolds": [{"family": "sphere_radial", "m": 2, "n": 2}],
            "data": [
                {"kind": "eigen_mode", "k": 1, "amplitude": 0.5},
                {"kind": "eigen_mode", "k": 2, "amplitude": 0.25}
            ],
            "times": [0.05, 0.1, 0.5, 1.0, 2.0],
            "grid_size": 96
        }"#,
    )
    .unwrap();
    let radii = [0.25, 0.5, 1.0, 1.5];
    config.bounds = vec![
        BoundSpec::new(BoundId::G3).with_eps(&[0.25, 0.5, 0.9]).with_radius(&radii),
        BoundSpec::new(BoundId::D4).with_alpha(&[1.5, 2.0, 4.0]).with_radius(&radii),
    ];
    let report = run_experiment(&config).unwrap();
    let all_asserted = report.rows.iter().all(|r| r.margin.is_some());
    let pass = exact && report.summary.passed && all_asserted;
    verdict(
        12,
        "local bounds",
        pass,
        start.elapsed(),
        format!("beta_eps = {b1}, beta_tilde = {b2}; {}", report_summary(&report)),
    );
    assert!(pass);
}

#[test]
fn criterion_13_solver_correctness() {
    let start = Instant::now();
    let max_err =
        |a: &[f64], b: &dyn Fn(usize) -> f64| a.iter().enumerate().map(|(i, v)| (v - b(i)).abs()).fold(0.0, f64::max);
    let mut decay = 0.0f64;
    let t = 0.6f64;
    let circle = model(Family::Circle, 1);
    for k in 1..=3u32 {
        let s = solve_heat(&circle, &InitialDatum::cosine(0.5, k as f64), t, 64, Scheme::Spectral).unwrap();
        let e = (-((k * k) as f64) * t).exp();
        decay = decay.max(max_err(s.u(), &|i| 1.0 + 0.5 * e * (k as f64 * s.grid()[i]).cos()));
    }
    let interval = make_model_manifold(Family::IntervalNeumann, 1, 1.0, Drift::None).unwrap().with_length(2.0).unwrap();
    for k in 1..=2u32 {
        let s = solve_heat(&interval, &InitialDatum::eigenmode(k, 0.5), t, 64, Scheme::Spectral).unwrap();
        let w = k as f64 * PI / 2.0;
        let e = (-w * w * t).exp();
        decay = decay.max(max_err(s.u(), &|i| 1.0 + 0.5 * e * (w * s.grid()[i]).cos()));
    }
    let sphere = model(Family::SphereRadial, 2);
    let legendre = [|c: f64| c, |c: f64| 1.5 * c * c - 0.5];
    for (k, p) in legendre.iter().enumerate() {
        let k1 = k as f64 + 1.0;
        let s = solve_heat(&sphere, &InitialDatum::eigenmode(k as u32 + 1, 0.5), t, 64, Scheme::Spectral).unwrap();
        let e = (-k1 * (k1 + 1.0) * t).exp();
        decay = decay.max(max_err(s.u(), &|i| 1.0 + 0.5 * e * p(s.grid()[i].cos())));
    }

    let cases = [
        (model(Family::Circle, 1), InitialDatum::cosine(0.4, 2.0)),
        (interval.clone(), InitialDatum::eigenmode(2, 0.4)),
        (model(Family::SphereRadial, 2), InitialDatum::eigenmode(1, 0.5)),
        (model(Family::SphereRadial, 3), InitialDatum::eigenmode(2, 0.25)),
        (model(Family::HyperbolicRadial, 2), InitialDatum::eigenmode(1, 0.5)),
        (model(Family::HalfLineNeumann, 1), InitialDatum::gaussian_bump(0.8, 1.0)),
    ];
    let mut mass = 0.0f64;
    let mut maxp = 0.0f64;
    let mut semigroup = 0.0f64;
    for (m, d) in &cases {
        for scheme in [Scheme::Spectral, Scheme::CrankNicolson] {
            for &t in &[0.05, 0.5, 2.0] {
                let s = solve_heat(m, d, t, 96, scheme).unwrap();
                maxp = maxp.max(s.max_principle_defect().unwrap_or(0.0));
                mass = mass.max(s.mass_defect().unwrap_or(0.0));
            }
        }
        // Convolution solvers take closed-form data only; restart those with the FD scheme.
        let scheme = if m.family() == Family::HalfLineNeumann { Scheme::CrankNicolson } else { Scheme::Spectral };
        let full = solve_heat(m, d, 0.8, 96, scheme).unwrap();
        let first = solve_heat(m, d, 0.3, 96, scheme).unwrap();
        let second = solve_heat(m, &first.as_datum(), 0.5, 96, scheme).unwrap();
        semigroup = semigroup.max(max_err(full.u(), &|i| second.u()[i]));
    }
    let pass = decay <= 1e-10 && mass <= 1e-10 && maxp <= 1e-9 && semigroup <= 1e-8;
    verdict(
        13,
        "solver correctness",
        pass,
        start.elapsed(),
        format!("decay {decay:.1e}, mass {mass:.1e}, max principle {maxp:.1e}, semigroup {semigroup:.1e}"),
    );
    assert!(pass);
}
