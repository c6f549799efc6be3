use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{McCheck, ReportFormat};
use crate::bounds::BoundId;
use crate::error::{Error, Result};
use crate::stochastic::FunctionalId;

/// One bound evaluated at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub bound_id: BoundId,
    pub family: String,
    pub m: u32,
    pub n: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub t: f64,
    pub x: Option<f64>,
    pub datum: String,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    #[serde(rename = "K_prime")]
    pub k_prime: Option<f64>,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    #[serde(rename = "X")]
    pub big_x: Option<f64>,
    #[serde(rename = "Y")]
    pub big_y: Option<f64>,
    #[serde(rename = "W")]
    pub big_w: Option<f64>,
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub margin: Option<f64>,
    pub tol: Option<f64>,
    pub domain_ok: bool,
    pub pass: bool,
    #[serde(default)]
    pub note: String,
    #[serde(default)]
    pub error: Option<String>,
}

impl BoundRow {
    /// Parameter label used to group rows into series.
    pub fn params_label(&self) -> String {
        [("alpha", self.alpha), ("eps", self.eps), ("K_prime", self.k_prime), ("R", self.radius)]
            .iter()
            .filter_map(|(k, v)| v.map(|v| format!("{k}={v}")))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Solver diagnostics for one `(manifold, datum, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRow {
    pub family: String,
    pub m: u32,
    pub n: f64,
    pub datum: String,
    pub t: f64,
    pub scheme: String,
    pub grid_size: usize,
    pub min_u: Option<f64>,
    pub mass_defect: Option<f64>,
    pub max_principle_defect: Option<f64>,
    pub error: Option<String>,
}

/// One Monte-Carlo estimate and its check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub functional_id: FunctionalId,
    pub family: String,
    pub datum: String,
    pub x: f64,
    pub t: f64,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub check: McCheck,
    pub target: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

/// Worst margin over the grid as a function of `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginSeries {
    pub bound_id: BoundId,
    pub family: String,
    pub m: u32,
    pub datum: String,
    pub params: String,
    pub points: Vec<(f64, f64)>,
    /// `increasing`, `decreasing`, `constant` or `mixed` in `t`.
    pub trend: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub package: String,
    pub version: String,
    /// FNV-1a hash of the canonical config JSON.
    pub config_hash: String,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub bound_rows: usize,
    pub skipped_rows: usize,
    pub failed_rows: usize,
    pub error_rows: usize,
    pub mc_rows: usize,
    pub mc_failed: usize,
    pub solve_errors: usize,
    /// Worst margin per bound over every row where it was asserted.
    pub worst_margin: BTreeMap<String, f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub fingerprint: Fingerprint,
    pub solves: Vec<SolveRow>,
    pub rows: Vec<BoundRow>,
    pub mc: Vec<McRow>,
    pub series: Vec<MarginSeries>,
    pub summary: Summary,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Fixed column set of the bound CSV.
pub const BOUND_COLUMNS: [&str; 16] =
    ["bound_id", "family", "m", "n", "K", "t", "x", "alpha", "eps", "X", "Y", "gamma", "a", "c", "margin", "domain_ok"];

fn num(v: f64) -> String {
    if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io { path: path.display().to_string(), message: e.to_string() }
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    let ser = |e: csv::Error| Error::Io { path: path.display().to_string(), message: e.to_string() };
    w.write_record(header).map_err(ser)?;
    for r in rows {
        w.write_record(&r).map_err(ser)?;
    }
    w.flush().map_err(io_err(path))
}

fn file_stem(id: BoundId) -> String {
    id.as_str().replace('\'', "prime").replace('-', "_")
}

/// Writes the report into `dir` and returns the files written.
///
/// CSV output: `bounds.csv` ([`BOUND_COLUMNS`]), `solves.csv`, `mc.csv` and one
/// `plot_<bound>.csv` per bound with the worst margin against `t`. JSON
/// output: `report.json`, the lossless form.
pub fn emit_report(report: &Report, dir: &Path, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = vec![];
    if formats.contains(&ReportFormat::Csv) {
        let path = dir.join("bounds.csv");
        write_csv(
            &path,
            &BOUND_COLUMNS,
            report.rows.iter().map(|r| {
                vec![
                    r.bound_id.to_string(),
                    r.family.clone(),
                    r.m.to_string(),
                    num(r.n),
                    num(r.k),
                    num(r.t),
                    opt(r.x),
                    opt(r.alpha),
                    opt(r.eps),
                    opt(r.big_x),
                    opt(r.big_y),
                    opt(r.gamma),
                    opt(r.a),
                    opt(r.c),
                    opt(r.margin),
                    r.domain_ok.to_string(),
                ]
            }),
        )?;
        written.push(path);

        let path = dir.join("solves.csv");
        write_csv(
            &path,
            &[
                "family",
                "m",
                "n",
                "datum",
                "t",
                "scheme",
                "grid_size",
                "min_u",
                "mass_defect",
                "max_principle_defect",
                "error",
            ],
            report.solves.iter().map(|s| {
                vec![
                    s.family.clone(),
                    s.m.to_string(),
                    num(s.n),
                    s.datum.clone(),
                    num(s.t),
                    s.scheme.clone(),
                    s.grid_size.to_string(),
                    opt(s.min_u),
                    opt(s.mass_defect),
                    opt(s.max_principle_defect),
                    s.error.clone().unwrap_or_default(),
                ]
            }),
        )?;
        written.push(path);

        let path = dir.join("mc.csv");
        write_csv(
            &path,
            &[
                "functional_id",
                "family",
                "datum",
                "x",
                "t",
                "estimate",
                "stderr",
                "n_paths",
                "dt",
                "seed",
                "target",
                "pass",
                "error",
            ],
            report.mc.iter().map(|r| {
                vec![
                    r.functional_id.to_string(),
                    r.family.clone(),
                    r.datum.clone(),
                    num(r.x),
                    num(r.t),
                    opt(r.estimate),
                    opt(r.stderr),
                    r.n_paths.to_string(),
                    num(r.dt),
                    r.seed.to_string(),
                    opt(r.target),
                    r.pass.to_string(),
                    r.error.clone().unwrap_or_default(),
                ]
            }),
        )?;
        written.push(path);

        let mut ids: Vec<BoundId> = report.series.iter().map(|s| s.bound_id).collect();
        ids.dedup();
        ids.sort();
        ids.dedup();
        for id in ids {
            let path = dir.join(format!("plot_{}.csv", file_stem(id)));
            write_csv(
                &path,
                &["bound_id", "family", "m", "datum", "params", "t", "min_margin", "trend"],
                report.series.iter().filter(|s| s.bound_id == id).flat_map(|s| {
                    s.points.iter().map(move |(t, m)| {
                        vec![
                            s.bound_id.to_string(),
                            s.family.clone(),
                            s.m.to_string(),
                            s.datum.clone(),
                            s.params.clone(),
                            num(*t),
                            num(*m),
                            s.trend.clone(),
                        ]
                    })
                }),
            )?;
            written.push(path);
        }
    }
    if formats.contains(&ReportFormat::Json) {
        let path = dir.join("report.json");
        std::fs::write(&path, report.to_json()?).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
