use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::{BoundSpec, ExperimentConfig, McCheck, McTask};
use super::report::{BoundRow, Fingerprint, MarginSeries, McRow, Report, SolveRow, Summary};
use crate::bounds::{clock_integrals, eval_bound, make_clock, tolerance, BoundForm, BoundId, BoundParams};
use crate::error::Result;
use crate::geometry::ModelManifold;
use crate::heatflow::{solve_heat, HeatState, InitialDatum};
use crate::stochastic::{estimate_functional_with, MonteCarlo, Potentials};

/// Runs every configured solve, bound and Monte-Carlo task.
///
/// Module errors are recorded in the affected rows; only an invalid
/// configuration is fatal.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let mut combos = vec![];
    for (mi, m) in config.manifolds.iter().enumerate() {
        for (di, d) in config.data.iter().enumerate() {
            for &t in &config.times {
                combos.push((mi, m, di, d, t));
            }
        }
    }
    let results: Vec<(SolveRow, Vec<BoundRow>)> =
        combos.par_iter().map(|&(_, m, _, d, t)| evaluate_combo(config, m, d, t)).collect();
    let mut solves = Vec::with_capacity(results.len());
    let mut rows = vec![];
    for (s, r) in results {
        solves.push(s);
        rows.extend(r);
    }
    let mc: Vec<McRow> = match &config.mc {
        Some(settings) => {
            let mc =
                MonteCarlo { n_paths: settings.n_paths, dt: settings.dt, seed: settings.seed, scheme: settings.scheme };
            settings.tasks.iter().map(|task| run_mc_task(config, task, &mc)).collect()
        }
        None => vec![],
    };
    let series = margin_series(&rows);
    let summary = summarize(&solves, &rows, &mc);
    Ok(Report {
        name: config.name.clone(),
        fingerprint: Fingerprint {
            package: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: format!("{:016x}", fnv1a(config.to_json()?.as_bytes())),
            seeds: config.mc.iter().map(|m| m.seed).collect(),
        },
        solves,
        rows,
        mc,
        series,
        summary,
    })
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x100000001b3))
}

fn base_row(spec: &BoundSpec, m: &ModelManifold, datum: &InitialDatum, t: f64, p: Option<&BoundParams>) -> BoundRow {
    BoundRow {
        bound_id: spec.id,
        family: m.family().to_string(),
        m: m.m(),
        n: m.n(),
        k: m.k(),
        t,
        x: None,
        datum: datum.label(),
        alpha: p.and_then(|p| p.alpha),
        eps: p.and_then(|p| p.eps),
        k_prime: p.and_then(|p| p.k_prime),
        radius: p.and_then(|p| p.radius),
        big_x: None,
        big_y: None,
        big_w: None,
        gamma: None,
        a: None,
        c: None,
        margin: None,
        tol: None,
        domain_ok: false,
        pass: false,
        note: String::new(),
        error: None,
    }
}

fn evaluate_combo(config: &ExperimentConfig, m: &ModelManifold, d: &InitialDatum, t: f64) -> (SolveRow, Vec<BoundRow>) {
    let mut solve = SolveRow {
        family: m.family().to_string(),
        m: m.m(),
        n: m.n(),
        datum: d.label(),
        t,
        scheme: config.scheme.to_string(),
        grid_size: config.grid_size,
        min_u: None,
        mass_defect: None,
        max_principle_defect: None,
        error: None,
    };
    let state = match solve_heat(m, d, t, config.grid_size, config.scheme) {
        Ok(s) => s,
        Err(e) => {
            solve.error = Some(e.to_string());
            let rows = config
                .bounds
                .iter()
                .flat_map(|spec| {
                    spec.expand(m.n(), m.k(), t, m.k_minus()).into_iter().map(|p| {
                        let mut r = base_row(spec, m, d, t, Some(&p));
                        r.error = Some(format!("solve failed: {e}"));
                        r
                    })
                })
                .collect();
            return (solve, rows);
        }
    };
    solve.min_u = state.u().iter().copied().reduce(f64::min);
    solve.mass_defect = state.mass_defect();
    solve.max_principle_defect = state.max_principle_defect();
    let mut rows = vec![];
    for spec in &config.bounds {
        rows.extend(evaluate_bound(config, spec, m, d, t, &state));
    }
    (solve, rows)
}

fn evaluate_bound(
    config: &ExperimentConfig,
    spec: &BoundSpec,
    m: &ModelManifold,
    d: &InitialDatum,
    t: f64,
    state: &HeatState,
) -> Vec<BoundRow> {
    let skip = if spec.id.requires_zero_drift() && !m.drift().is_zero() {
        Some("requires Z = 0")
    } else if m.sigma().is_some_and(|s| s < 0.0) {
        Some("requires a convex boundary")
    } else {
        None
    };
    let mut rows = vec![];
    for p in spec.expand(m.n(), m.k(), t, m.k_minus()) {
        if let Some(note) = skip {
            let mut r = base_row(spec, m, d, t, Some(&p));
            r.note = note.to_string();
            r.pass = true;
            rows.push(r);
            continue;
        }
        let shared: Option<Result<BoundForm>> = (!spec.id.is_implicit()).then(|| eval_bound(spec.id, &p));
        for (i, &x) in state.grid().iter().enumerate() {
            let mut r = base_row(spec, m, d, t, Some(&p));
            r.x = Some(x);
            let (hx, hy, hw) = match state.harnack_at(i) {
                Ok(q) => q,
                Err(e) => {
                    r.error = Some(e.to_string());
                    rows.push(r);
                    continue;
                }
            };
            r.big_x = Some(hx);
            r.big_y = Some(hy);
            r.big_w = Some(hw);
            let form = match &shared {
                Some(f) => f.clone(),
                None => eval_bound(spec.id, &p.at(hx, hy, hw)),
            };
            match form {
                Err(e) => r.error = Some(e.to_string()),
                Ok(f) => {
                    r.domain_ok = f.domain_ok;
                    r.note = f.note.clone();
                    if f.domain_ok {
                        let margin = f.margin(hx, hy).value().expect("domain ok");
                        let tol = tolerance(config.tolerance.rel, f.c);
                        r.gamma = Some(f.gamma);
                        r.a = Some(f.a);
                        r.c = Some(f.c);
                        r.margin = Some(margin);
                        r.tol = Some(tol);
                        r.pass = margin >= -tol;
                    } else {
                        r.pass = true;
                    }
                }
            }
            rows.push(r);
        }
    }
    rows
}

fn run_mc_task(config: &ExperimentConfig, task: &McTask, mc: &MonteCarlo) -> McRow {
    let mut row = McRow {
        functional_id: task.functional.id(),
        family: task.manifold.family().to_string(),
        datum: task.datum.label(),
        x: task.x,
        t: task.t,
        estimate: None,
        stderr: None,
        n_paths: mc.n_paths,
        dt: mc.dt,
        seed: mc.seed,
        check: task.check,
        target: None,
        pass: false,
        error: None,
    };
    match mc_task_inner(config, task, mc, &mut row) {
        Ok(()) => {}
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn mc_task_inner(config: &ExperimentConfig, task: &McTask, mc: &MonteCarlo, row: &mut McRow) -> Result<()> {
    let m = &task.manifold;
    let needs_state = !matches!(task.check, McCheck::None | McCheck::Equals { .. });
    let state =
        if needs_state { Some(solve_heat(m, &task.datum, task.t, config.grid_size, config.scheme)?) } else { None };
    // Start on a solver node so the comparison uses the solver's own values.
    let node = state.as_ref().map(|s| {
        let i = s
            .grid()
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - task.x).abs().total_cmp(&(b.1 - task.x).abs()))
            .map(|(i, _)| i)
            .expect("non-empty grid");
        (s, i)
    });
    if let Some((s, i)) = node {
        row.x = s.grid()[i];
    }
    let clock = task.clock.map(|c| make_clock(c, task.t)).transpose()?;
    let k = task.k.unwrap_or(m.k());
    let sigma = task.sigma.or(m.sigma()).unwrap_or(0.0);
    let potentials = Potentials::constant(k, sigma);
    let e = estimate_functional_with(m, &task.datum, row.x, task.t, clock.as_ref(), task.functional, mc, &potentials)?;
    row.estimate = Some(e.value);
    row.stderr = Some(e.stderr);
    let slack = config.tolerance.mc_sigmas * e.stderr;
    let (target, pass) = match (task.check, node) {
        (McCheck::None, _) => (None, true),
        (McCheck::Equals { value }, _) => (Some(value), (e.value - value).abs() <= slack + 1e-12 * (1.0 + value.abs())),
        (McCheck::HeatValue, Some((s, i))) => {
            let v = s.u()[i];
            (Some(v), (e.value - v).abs() <= slack + 1e-9 * (1.0 + v.abs()))
        }
        (McCheck::J0Deterministic, Some((s, i))) => {
            let clock = clock.as_ref().ok_or_else(|| crate::error::invalid("clock", "J0 check needs a clock"))?;
            let ints = clock_integrals(clock, k, task.t)?;
            let v = 0.5 * m.n() * s.u()[i] * ints.derivsq - s.lu()[i] * ints.sqprime;
            (Some(v), (e.value - v).abs() <= slack + 1e-9 * (1.0 + v.abs()))
        }
        (McCheck::J0Upper, Some((s, i))) => {
            let w = s.harnack_at(i)?.2;
            (Some(w), w <= e.value + slack + 1e-9 * (1.0 + w.abs()))
        }
        (McCheck::GUpper, Some((s, i))) => {
            let g = s.grad_u()[i].abs();
            (Some(g), g <= e.value + slack + 1e-9 * (1.0 + g))
        }
        (_, None) => unreachable!("state solved for solver checks"),
    };
    row.target = target;
    row.pass = pass;
    Ok(())
}

/// `(bound, family, m, datum, params)`.
type SeriesKey = (String, String, u32, String, String);

fn margin_series(rows: &[BoundRow]) -> Vec<MarginSeries> {
    let mut groups: BTreeMap<SeriesKey, (BoundId, BTreeMap<u64, f64>)> = BTreeMap::new();
    for r in rows {
        let Some(margin) = r.margin else { continue };
        let key = (r.bound_id.to_string(), r.family.clone(), r.m, r.datum.clone(), r.params_label());
        let entry = groups.entry(key).or_insert_with(|| (r.bound_id, BTreeMap::new()));
        let slot = entry.1.entry(r.t.to_bits()).or_insert(f64::INFINITY);
        *slot = slot.min(margin);
    }
    groups
        .into_iter()
        .map(|((_, family, m, datum, params), (id, by_t))| {
            let mut points: Vec<(f64, f64)> = by_t.into_iter().map(|(t, v)| (f64::from_bits(t), v)).collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            let up = points.windows(2).all(|w| w[1].1 >= w[0].1);
            let down = points.windows(2).all(|w| w[1].1 <= w[0].1);
            let trend = match (up, down) {
                (true, true) => "constant",
                (true, false) => "increasing",
                (false, true) => "decreasing",
                (false, false) => "mixed",
            };
            MarginSeries { bound_id: id, family, m, datum, params, points, trend: trend.to_string() }
        })
        .collect()
}

fn summarize(solves: &[SolveRow], rows: &[BoundRow], mc: &[McRow]) -> Summary {
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    for r in rows {
        if let Some(m) = r.margin {
            let w = worst.entry(r.bound_id.to_string()).or_insert(f64::INFINITY);
            *w = w.min(m);
        }
    }
    let failed_rows = rows.iter().filter(|r| !r.pass).count();
    let mc_failed = mc.iter().filter(|r| !r.pass).count();
    let solve_errors = solves.iter().filter(|s| s.error.is_some()).count();
    Summary {
        bound_rows: rows.len(),
        skipped_rows: rows.iter().filter(|r| r.error.is_none() && !r.domain_ok).count(),
        failed_rows,
        error_rows: rows.iter().filter(|r| r.error.is_some()).count(),
        mc_rows: mc.len(),
        mc_failed,
        solve_errors,
        worst_margin: worst,
        passed: failed_rows == 0 && mc_failed == 0 && solve_errors == 0,
    }
}
