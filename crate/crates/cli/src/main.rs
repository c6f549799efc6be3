use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use liyau_core::bounds::{eval_bound, tolerance, BoundId, BoundParams, Margin};
use liyau_core::harness::{emit_report, run_experiment, ExperimentConfig, OutputSpec, Report, ReportFormat};
use liyau_core::heatflow::kernel_jet;
use liyau_core::{make_model_manifold, Drift, Family};

#[derive(Parser)]
#[command(name = "liyau", version, about = "Numerical checks of Li-Yau type gradient bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the bound suite of a config and check every margin.
    Verify(RunArgs),
    /// Run only the Monte-Carlo tasks of a config.
    Mc(RunArgs),
    /// Evaluate one bound in normal form, optionally at a point.
    Bounds(BoundArgs),
    /// Print exact heat kernels and their first two derivatives.
    Kernel(KernelArgs),
    /// Run a config and print the worst-margin series in t.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the Monte-Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report formats; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    format: Vec<ReportFormat>,
    /// Overrides the relative margin tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    id: BoundId,
    #[arg(long)]
    n: f64,
    #[arg(long = "K", alias = "k", allow_negative_numbers = true)]
    k: f64,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "K-prime", allow_negative_numbers = true)]
    k_prime: Option<f64>,
    #[arg(long = "R")]
    radius: Option<f64>,
    #[arg(long = "K-region", allow_negative_numbers = true)]
    k_region: Option<f64>,
    #[arg(long = "X")]
    x: Option<f64>,
    #[arg(long = "Y", allow_negative_numbers = true)]
    y: Option<f64>,
    #[arg(long = "W")]
    w: Option<f64>,
    #[arg(long, default_value = "1e-6")]
    tol: f64,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    family: Family,
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Effective dimension; defaults to `m`.
    #[arg(long)]
    n: Option<f64>,
    #[arg(long, default_value = "none")]
    drift: Drift,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    t: f64,
    /// Evaluation points; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    x: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y: f64,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Verify(args) => {
            let report = run_config(&args, |_| {})?;
            print_summary(&report);
            Ok(report.summary.passed)
        }
        Command::Mc(args) => {
            let report = run_config(&args, |c| {
                c.manifolds.clear();
                c.bounds.clear();
            })?;
            if report.mc.is_empty() {
                bail!("config has no Monte-Carlo tasks");
            }
            for r in &report.mc {
                let status = if r.pass { "PASS" } else { "FAIL" };
                let est = r.estimate.map_or("-".to_string(), |v| format!("{v:.6}"));
                let se = r.stderr.map_or("-".to_string(), |v| format!("{v:.2e}"));
                let target = r.target.map_or("-".to_string(), |v| format!("{v:.6}"));
                let err = r.error.as_deref().unwrap_or("");
                println!(
                    "{status} {} {} x={} t={} estimate={est} se={se} target={target} {err}",
                    r.functional_id, r.family, r.x, r.t
                );
            }
            Ok(report.summary.mc_failed == 0)
        }
        Command::Sweep(args) => {
            let report = run_config(&args, |_| {})?;
            for s in &report.series {
                let pts: Vec<String> = s.points.iter().map(|(t, m)| format!("{t}:{m:.3e}")).collect();
                println!(
                    "{} {} m={} {} [{}] {} {}",
                    s.bound_id,
                    s.family,
                    s.m,
                    s.datum,
                    s.params,
                    s.trend,
                    pts.join(" ")
                );
            }
            print_summary(&report);
            Ok(report.summary.passed)
        }
        Command::Bounds(args) => bounds(args),
        Command::Kernel(args) => kernel(args),
    }
}

fn run_config(args: &RunArgs, adjust: impl FnOnce(&mut ExperimentConfig)) -> anyhow::Result<Report> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        if let Some(mc) = config.mc.as_mut() {
            mc.seed = seed;
        }
    }
    if let Some(tol) = args.tol {
        config.tolerance.rel = tol;
    }
    if let Some(dir) = &args.out {
        let formats =
            config.output.as_ref().map(|o| o.formats.clone()).unwrap_or(vec![ReportFormat::Csv, ReportFormat::Json]);
        config.output = Some(OutputSpec { dir: dir.clone(), formats });
    }
    if let Some(out) = config.output.as_mut() {
        if !args.format.is_empty() {
            out.formats = args.format.clone();
        }
    }
    adjust(&mut config);
    config.validate()?;
    let report = run_experiment(&config)?;
    if let Some(out) = &config.output {
        let files = emit_report(&report, &out.dir, &out.formats)?;
        for f in files {
            eprintln!("wrote {}", f.display());
        }
    }
    Ok(report)
}

fn print_summary(report: &Report) {
    let s = &report.summary;
    for (id, m) in &s.worst_margin {
        println!("worst margin {id}: {m:.6e}");
    }
    for r in report.rows.iter().filter(|r| !r.pass).take(20) {
        println!(
            "FAIL {} {} t={} x={:?} {} margin={:?} error={}",
            r.bound_id,
            r.family,
            r.t,
            r.x,
            r.params_label(),
            r.margin,
            r.error.as_deref().unwrap_or("")
        );
    }
    println!(
        "{}: {} rows, {} failed, {} errors, {} outside domain; {} mc rows, {} failed; {} solve errors",
        if s.passed { "PASS" } else { "FAIL" },
        s.bound_rows,
        s.failed_rows,
        s.error_rows,
        s.skipped_rows,
        s.mc_rows,
        s.mc_failed,
        s.solve_errors
    );
}

fn bounds(args: BoundArgs) -> anyhow::Result<bool> {
    let mut p = BoundParams::new(args.n, args.k, args.t);
    p.alpha = args.alpha;
    p.eps = args.eps;
    p.k_prime = args.k_prime;
    if let Some(r) = args.radius {
        p = p.ball(r, args.k_region.unwrap_or(0.0));
    }
    let point = match (args.x, args.y) {
        (Some(x), Some(y)) => Some((x, y)),
        (None, None) => None,
        _ => bail!("--X and --Y must be given together"),
    };
    if let Some((x, y)) = point {
        p = p.at(x, y, args.w.unwrap_or(0.0));
    }
    let form = eval_bound(args.id, &p)?;
    let (margin, pass) = match point.map(|(x, y)| form.margin(x, y)) {
        Some(Margin::Value(m)) => (Some(m), m >= -tolerance(args.tol, form.c)),
        _ => (None, true),
    };
    match args.format {
        ReportFormat::Json => {
            let mut v = serde_json::to_value(&form).context("serializing bound")?;
            v["margin"] = serde_json::json!(margin);
            v["pass"] = serde_json::json!(pass);
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        ReportFormat::Csv => {
            println!("bound_id,gamma,a,c,domain_ok,margin,pass");
            let m = margin.map_or(String::new(), |m| m.to_string());
            println!("{},{},{},{},{},{m},{pass}", form.bound_id, form.gamma, form.a, form.c, form.domain_ok);
        }
    }
    Ok(pass)
}

fn kernel(args: KernelArgs) -> anyhow::Result<bool> {
    let mut manifold = make_model_manifold(args.family, args.m, args.n.unwrap_or(args.m as f64), args.drift)?;
    if let Some(len) = args.length {
        manifold = manifold.with_length(len)?;
    }
    let rows: Vec<(f64, (f64, f64, f64))> =
        args.x.iter().map(|&x| kernel_jet(&manifold, args.t, x, args.y).map(|j| (x, j))).collect::<Result<_, _>>()?;
    match args.format {
        ReportFormat::Csv => {
            println!("x,p,dp,d2p");
            for (x, (p, d1, d2)) in rows {
                println!("{x},{p:e},{d1:e},{d2:e}");
            }
        }
        ReportFormat::Json => {
            let v: Vec<_> =
                rows.iter().map(|(x, (p, d1, d2))| serde_json::json!({"x": x, "p": p, "dp": d1, "d2p": d2})).collect();
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
    }
    Ok(true)
}
