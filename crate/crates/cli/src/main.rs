//! `cylmin`: sweeps, reports and figure data for the anisotropic energy on
//! the circle and the cylinder.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::panic;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cylmin::elliptic::phase_portrait;
use cylmin::io::{self as cio, LandscapeRow, TraceReport};
use cylmin::minimize::{match_cylinder, multistart_circle, multistart_cylinder, DescentTrace};
use cylmin::relax::poincare;
use cylmin::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cylmin",
    version,
    about = "Ground states of the anisotropic Dirichlet energy on the circle and the cylinder"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Sharp Poincare constant: closed form against the discretized oracle.
    Poincare,
    /// Energy landscape over a kappa2 range.
    Sweep,
    /// Multistart gradient descent and classification of the result.
    Minimize,
    /// The kappa2 at which degree 0 and degree 1 cost the same.
    Threshold,
    /// alpha, E and the degree-zero energy for one kappa2 or a range.
    Elliptic,
    /// Level sets of y^2 - kappa2 sin^2 x.
    PhasePortrait,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true)]
    kappa2: Option<f64>,
    #[arg(long, global = true)]
    kappa2_min: Option<f64>,
    #[arg(long, global = true)]
    kappa2_max: Option<f64>,
    /// Sweep points (or samples per branch for phase-portrait).
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true, default_value_t = 512)]
    grid_n: usize,
    #[arg(long, global = true, default_value_t = 65)]
    z_n: usize,
    #[arg(long, global = true, default_value_t = 8)]
    seeds: usize,
    #[arg(long, global = true, default_value = "none")]
    constraint: Constraint,
    /// Winding degree class for in-plane minimization.
    #[arg(long, global = true, allow_negative_numbers = true)]
    degree: Option<i64>,
    /// Minimize on the cylinder instead of the circle.
    #[arg(long, global = true)]
    cylinder: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run<T = ()> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

fn sink(out: Option<&Path>) -> Run<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Usage(format!("cannot write {}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(out: Option<&Path>, value: &impl serde::Serialize) -> Run {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

impl Opts {
    fn kappa2(&self) -> Run<f64> {
        match self.kappa2 {
            Some(k) if k > 0.0 && k.is_finite() => Ok(k),
            Some(k) => usage(format!("--kappa2 must be positive, got {k}")),
            None => usage("--kappa2 is required"),
        }
    }

    /// Either the single `--kappa2` or the evenly spaced range.
    fn kappa2_values(&self, default_range: Option<(f64, f64, usize)>) -> Run<Vec<f64>> {
        let ranged = self.kappa2_min.is_some() || self.kappa2_max.is_some();
        if self.kappa2.is_some() {
            if ranged {
                return usage("give either --kappa2 or --kappa2-min/--kappa2-max, not both");
            }
            return Ok(vec![self.kappa2()?]);
        }
        let (lo, hi, steps) = match (self.kappa2_min, self.kappa2_max, default_range) {
            (Some(lo), Some(hi), d) => (lo, hi, self.steps.or(d.map(|d| d.2)).unwrap_or(50)),
            (None, None, Some((lo, hi, n))) => (lo, hi, self.steps.unwrap_or(n)),
            (None, None, None) => {
                return usage("--kappa2 or --kappa2-min/--kappa2-max is required")
            }
            _ => return usage("--kappa2-min and --kappa2-max go together"),
        };
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return usage(format!("need 0 < kappa2-min < kappa2-max, got {lo}..{hi}"));
        }
        if steps < 2 {
            return usage(format!("--steps must be at least 2, got {steps}"));
        }
        Ok((0..steps)
            .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            .collect())
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

fn cmd_poincare(o: &Opts) -> Run {
    let grid: Grid = make_grid(o.grid_n)?;
    let ks = o.kappa2_values(None)?;
    let rows = ks
        .par_iter()
        .map(|&k| poincare(k, &grid))
        .collect::<Result<Vec<_>>>()?;
    match o.format(Format::Csv) {
        Format::Csv => {
            let mut w = sink(o.out.as_deref())?;
            cio::write_poincare_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Format::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|r| {
                    let diff = r.c2_numeric.map(|n| (n - r.c2_closed).abs());
                    json!({
                        "kappa2": r.kappa2, "omega2": r.omega2, "c2_closed": r.c2_closed,
                        "c2_numeric": r.c2_numeric, "difference": diff,
                        "phi_kappa": r.phi_kappa, "regime": r.regime,
                    })
                })
                .collect();
            if items.len() == 1 {
                write_json(o.out.as_deref(), &items[0])?;
            } else {
                write_json(o.out.as_deref(), &items)?;
            }
        }
    }
    for r in &rows {
        if let Some(n) = r.c2_numeric {
            eprintln!(
                "kappa2 = {}: c2 = {:.12} (closed), {:.12} (N = {}), |difference| = {:.3e}, regime {}",
                r.kappa2, r.c2_closed, n, o.grid_n, (n - r.c2_closed).abs(), r.regime
            );
        }
    }
    Ok(())
}

fn cmd_sweep(o: &Opts) -> Run {
    let ks = o.kappa2_values(Some((0.1, 6.0, 60)))?;
    let rows = ks
        .par_iter()
        .map(|&k| LandscapeRow::compute(k))
        .collect::<Result<Vec<_>>>()?;
    match o.format(Format::Csv) {
        Format::Csv => {
            let mut w = sink(o.out.as_deref())?;
            cio::write_landscape_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Format::Json => write_json(o.out.as_deref(), &rows)?,
    }
    Ok(())
}

fn cmd_elliptic(o: &Opts) -> Run {
    let ks = o.kappa2_values(None)?;
    let rows = ks
        .par_iter()
        .map(|&k| EllipticSolution::solve(k))
        .collect::<Result<Vec<_>>>()?;
    match o.format(Format::Csv) {
        Format::Csv => {
            let mut w = sink(o.out.as_deref())?;
            cio::write_elliptic_csv(&mut w, &rows)?;
            w.flush()?;
        }
        Format::Json => write_json(o.out.as_deref(), &rows)?,
    }
    Ok(())
}

fn cmd_threshold(o: &Opts) -> Run {
    if !(o.tol > 0.0) {
        return usage(format!("--tol must be positive, got {}", o.tol));
    }
    let k: f64 = solve_threshold(o.tol)?;
    let h = elliptic::threshold_residual(k)?;
    match o.format(Format::Csv) {
        Format::Csv => {
            let mut w = sink(o.out.as_deref())?;
            writeln!(w, "kappa2_star,residual")?;
            writeln!(w, "{k:e},{h:e}")?;
            w.flush()?;
        }
        Format::Json => write_json(
            o.out.as_deref(),
            &json!({ "kappa2_star": k, "residual": h }),
        )?,
    }
    Ok(())
}

fn cmd_phase_portrait(o: &Opts) -> Run {
    let k = o.kappa2()?;
    let samples = o.steps.unwrap_or(201);
    let points = phase_portrait(k, &[-0.5 * k, 1.0], samples)?;
    match o.format(Format::Csv) {
        Format::Csv => {
            let mut w = sink(o.out.as_deref())?;
            cio::write_phase_csv(&mut w, &points)?;
            w.flush()?;
        }
        Format::Json => write_json(o.out.as_deref(), &points)?,
    }
    Ok(())
}

/// Descent on the lifted angle in the class of winding degree `degree`,
/// one run per seed from a perturbed uniform winding.
fn theta_multistart(
    grid: &Grid,
    params: &Params,
    opts: &Options,
    degree: i64,
    seeds: usize,
) -> Result<(Angles, Vec<f64>)> {
    let j = degree - 1;
    let runs = (0..seeds as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed + k);
            let coeffs: Vec<(f64, f64)> = (1..=3)
                .map(|_| (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
                .collect();
            let psi: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&t| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(m, &(a, b))| {
                            let m = (m + 1) as f64;
                            a * (m * t).cos() + b * (m * t).sin()
                        })
                        .sum()
                })
                .collect();
            let init = AngleProfile::from_periodic(grid.clone(), &psi, j)?;
            descend_theta(&init, params, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let best = runs
        .into_iter()
        .min_by(|a, b| a.final_energy().total_cmp(&b.final_energy()))
        .ok_or_else(|| Error::InvalidParameter("--seeds must be at least 1".into()))?;
    Ok((best.final_field, best.energies))
}

fn best_of<F>(traces: Vec<DescentTrace<f64, F>>) -> Run<DescentTrace<f64, F>> {
    traces
        .into_iter()
        .min_by(|a, b| a.final_energy().total_cmp(&b.final_energy()))
        .map_or_else(|| usage("--seeds must be at least 1"), Ok)
}

fn cmd_minimize(o: &Opts) -> Run {
    if o.format == Some(Format::Csv) {
        return usage("minimize writes a JSON trace; the field CSV goes next to --out");
    }
    if o.seeds == 0 {
        return usage("--seeds must be at least 1");
    }
    let k = o.kappa2()?;
    let params = EnergyParams::new(k)?;
    let opts = DescentOptions {
        constraint: o.constraint,
        ..Default::default()
    };
    let grid: Grid = make_grid(o.grid_n)?;
    let families = Family::ALL;
    let field_path = o.out.as_deref().map(|p| p.with_extension("field.csv"));

    let (report, energy) = if let Some(degree) = o.degree {
        if o.constraint != Constraint::InPlane || o.cylinder {
            return usage("--degree needs --constraint in-plane on the circle");
        }
        let (profile, energies) = theta_multistart(&grid, &params, &opts, degree, o.seeds)?;
        let field = profile.reconstruct();
        let label = match_to_family(&field, &families, k)?;
        if let Some(p) = &field_path {
            let mut w = sink(Some(p))?;
            cio::write_field_csv(&mut w, &field)?;
            w.flush()?;
        }
        let e = *energies.last().expect("initial energy is recorded");
        (trace_report(k, o.constraint, energies, label.label), e)
    } else if o.cylinder {
        let best = best_of(multistart_cylinder(&grid, o.z_n, &params, &opts, o.seeds)?)?;
        let label = match_cylinder(&best.final_field, &families, k)?;
        if let Some(p) = &field_path {
            let mut w = sink(Some(p))?;
            cio::write_cylinder_csv(&mut w, &best.final_field)?;
            w.flush()?;
        }
        let e = best.final_energy();
        (trace_report(k, o.constraint, best.energies, label.label), e)
    } else {
        let best = best_of(multistart_circle(&grid, &params, &opts, o.seeds)?)?;
        let label = match_to_family(&best.final_field, &families, k)?;
        if let Some(p) = &field_path {
            let mut w = sink(Some(p))?;
            cio::write_field_csv(&mut w, &best.final_field)?;
            w.flush()?;
        }
        let e = best.final_energy();
        (trace_report(k, o.constraint, best.energies, label.label), e)
    };
    let mut w = sink(o.out.as_deref())?;
    writeln!(w, "{}", report.to_json())?;
    w.flush()?;
    eprintln!(
        "kappa2 = {k}: energy {energy:.12} after {} iterations, closest to {}",
        report.iterations, report.final_label
    );
    Ok(())
}

fn trace_report(k: f64, c: Constraint, energies: Vec<f64>, label: &str) -> TraceReport<f64> {
    TraceReport {
        kappa2: k,
        constraint: c,
        iterations: energies.len() - 1,
        final_energy: *energies.last().expect("initial energy is recorded"),
        energies,
        final_label: label.to_string(),
    }
}

fn configure_threads() -> Run {
    let Ok(raw) = std::env::var("CYLMIN_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return usage(format!(
                "CYLMIN_THREADS must be a positive integer, got {raw:?}"
            ))
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Run {
    configure_threads()?;
    let o = &cli.opts;
    match cli.command {
        Command::Poincare => cmd_poincare(o),
        Command::Sweep => cmd_sweep(o),
        Command::Minimize => cmd_minimize(o),
        Command::Threshold => cmd_threshold(o),
        Command::Elliptic => cmd_elliptic(o),
        Command::PhasePortrait => cmd_phase_portrait(o),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    panic::set_hook(Box::new(|_| {}));
    match panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Numerical(msg))) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("internal error");
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
