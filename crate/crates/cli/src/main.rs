use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use schwarz_core::bounds::{self, BoundReport};
use schwarz_core::fd_oracle::{fd_solve_with, sup_difference};
use schwarz_core::gallery::{self, ExampleReport};
use schwarz_core::harmonic::{pde_residual, RHarmonicField};
use schwarz_core::lemma::{self, LemaProbe};
use schwarz_core::metric::{interior_grid, log_concavity_report};
use schwarz_core::{BoundaryData, BoundarySpec, Error, HTransform, HarmonicField, Metric1D, MetricSpec, Tolerances};

/// Numerical laboratory for real harmonic maps into one-dimensional metrics.
#[derive(Debug, Parser)]
#[command(name = "schwarz-lab", version)]
struct Cli {
    /// Directory receiving summary.json, metadata.json and CSV artifacts.
    #[arg(long, global = true, env = "SCHWARZ_LAB_OUT", default_value = "schwarz-lab-out")]
    out: PathBuf,
    /// Override a tolerance, e.g. `--tolerance check_slack=1e-8`; repeatable.
    #[arg(long = "tolerance", global = true, value_name = "LABEL=VALUE")]
    tolerances: Vec<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curvature of a metric on a uniform interior grid.
    Curvature {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, default_value_t = 999)]
        grid_n: usize,
    },
    /// Mass, H-transform and its inverse on a uniform interior grid.
    Transform {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, default_value_t = 999)]
        grid_n: usize,
    },
    /// Solves by the H-transform and by finite differences and compares.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 201)]
        grid_n: usize,
    },
    /// Gradient, value and distance bounds on a ring grid.
    CheckBounds {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
    },
    /// Scalar lemma oracles.
    Lemma {
        #[arg(long, value_enum)]
        which: LemmaKind,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 2001)]
        grid_points: usize,
        /// Metric for the unimodal lemma.
        #[arg(long)]
        metric: Option<PathBuf>,
    },
    /// Extremal sweeps.
    Sweep {
        #[arg(long, value_enum)]
        family: SweepFamily,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        #[arg(long, default_value_t = 20.0)]
        k_max: f64,
        #[arg(long, default_value_t = 200)]
        k_count: usize,
        #[arg(long, default_value_t = 0.999)]
        x_max: f64,
        #[arg(long, default_value_t = 200)]
        x_count: usize,
    },
    /// Worked examples.
    Gallery {
        #[arg(long, value_enum)]
        name: Example,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
}

#[derive(Debug, Args)]
struct Problem {
    #[arg(long)]
    metric: PathBuf,
    #[arg(long)]
    boundary: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LemmaKind {
    Propi1,
    Lema,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepFamily {
    Psi,
    RRatio,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Example {
    NegativeCurvature,
    ZeroCurvature,
    Strip,
    HalfPlane,
}

/// Where a run ended: all checks passed, or some mathematical check failed.
struct Outcome {
    summary: Value,
    passed: bool,
}

/// Files collected during a run and written once at the end.
#[derive(Default)]
struct Artifacts {
    files: BTreeMap<String, String>,
}

impl Artifacts {
    fn add(&mut self, name: &str, contents: String) {
        self.files.insert(name.into(), contents);
    }

    fn write(&self, dir: &Path) -> anyhow::Result<()> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        for (name, contents) in &self.files {
            fs::write(dir.join(name), contents).with_context(|| format!("cannot write {name}"))?;
        }
        Ok(())
    }
}

fn read_metric(path: &Path) -> anyhow::Result<(Metric1D, MetricSpec)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read metric spec {}", path.display()))?;
    let spec = MetricSpec::from_json(&text)?;
    Ok((spec.build()?, spec))
}

fn read_boundary(path: &Path, tol: &Tolerances) -> anyhow::Result<(BoundaryData, BoundarySpec)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read boundary spec {}", path.display()))?;
    let spec = BoundarySpec::from_json(&text)?;
    Ok((spec.build(tol.sample_count)?, spec))
}

fn parse_tolerances(overrides: &[String]) -> anyhow::Result<Tolerances> {
    let mut tol = Tolerances::default();
    for item in overrides {
        let (label, value) = item.split_once('=').with_context(|| format!("tolerance override {item:?} is not LABEL=VALUE"))?;
        let value: f64 = value.trim().parse().with_context(|| format!("tolerance value in {item:?} is not a number"))?;
        tol.set(label.trim(), value)?;
    }
    Ok(tol)
}

fn csv<const N: usize>(header: &str, rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut out = format!("{header}\n");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

/// A report without its per-point rows, which go to CSV.
fn report_summary(r: &BoundReport) -> Value {
    let mut v = serde_json::to_value(r).unwrap();
    if let Some(map) = v.as_object_mut() {
        map.remove("points");
        map.insert("point_count".into(), json!(r.points.len()));
    }
    v
}

fn curvature(metric_path: &Path, grid_n: usize, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let (metric, spec) = read_metric(metric_path)?;
    let grid = interior_grid(&metric, grid_n);
    let mut rows = Vec::with_capacity(grid.len());
    for &u in &grid {
        let numeric = metric.curvature_numeric(u).unwrap_or(f64::NAN);
        rows.push([u, metric.density(u)?, metric.curvature_at(u)?, numeric]);
    }
    art.add("curvature.csv", csv("u,R,K,K_numeric", rows));
    let report = log_concavity_report(&metric, &grid)?;
    let passed = !metric.declares_nonnegative_curvature() || report.is_nonnegative;
    Ok(Outcome {
        summary: json!({
            "metric": spec,
            "grid_n": grid_n,
            "declares_nonnegative_curvature": metric.declares_nonnegative_curvature(),
            "log_concavity": report,
        }),
        passed,
    })
}

fn transform(metric_path: &Path, grid_n: usize, tol: &Tolerances, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let (metric, spec) = read_metric(metric_path)?;
    let h = HTransform::from_primitive(schwarz_core::metric::Primitive::with_tolerances(&metric, tol)?)?;
    let mut rows = Vec::with_capacity(grid_n);
    let mut roundtrip: f64 = 0.0;
    for u in interior_grid(&metric, grid_n) {
        let value = h.eval(u)?;
        roundtrip = roundtrip.max((h.inverse(value)? - u).abs());
        rows.push([u, value]);
    }
    art.add("transform.csv", csv("u,H", rows));
    Ok(Outcome {
        summary: json!({
            "metric": spec,
            "grid_n": grid_n,
            "mass": h.mass(),
            "offset": h.offset(),
            "max_inverse_roundtrip_error": roundtrip,
        }),
        passed: true,
    })
}

fn solve(problem: &Problem, grid_n: usize, tol: &Tolerances, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let (metric, metric_spec) = read_metric(&problem.metric)?;
    let (boundary, boundary_spec) = read_boundary(&problem.boundary, tol)?;
    let field = RHarmonicField::with_tolerances(&metric, &boundary, tol)?;
    let grid = fd_solve_with(&metric, &boundary, grid_n, tol)?;
    art.add("fd_grid.csv", grid.to_csv());
    let inside: Vec<Complex64> = grid.interior().into_iter().map(|(z, _)| z).filter(|z| z.norm() <= tol.eval_radius).collect();
    let mut rows = Vec::with_capacity(inside.len());
    for &z in &inside {
        rows.push([z.re, z.im, field.value(z)?]);
    }
    art.add("solution.csv", csv("x,y,f", rows));
    let diff = sup_difference(&grid, &field, tol.eval_radius)?;
    let step = 1e-3;
    let mut residual: f64 = 0.0;
    for z in bounds::ring_grid(10, 32, 0.9) {
        residual = residual.max(pde_residual(&metric, &field, z, step)?.abs());
    }
    Ok(Outcome {
        summary: json!({
            "metric": metric_spec,
            "boundary": boundary_spec,
            "grid_n": grid_n,
            "sweeps": grid.sweeps(),
            "last_update": grid.last_update(),
            "sup_difference": diff,
            "max_pde_residual": residual,
        }),
        passed: true,
    })
}

fn check_bounds(problem: &Problem, radius: Option<f64>, pair_count: usize, seed: u64, tol: &Tolerances, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let (metric, metric_spec) = read_metric(&problem.metric)?;
    let (boundary, boundary_spec) = read_boundary(&problem.boundary, tol)?;
    let radius = radius.unwrap_or(tol.eval_radius);
    if !(radius > 0.0 && radius < 1.0) {
        anyhow::bail!(Error::InvalidInput(format!("radius must lie in (0, 1), got {radius}")));
    }
    let grid = bounds::ring_grid(24, 96, radius);
    let main = bounds::check_main_bound(&metric, &boundary, &grid, tol)?;
    let (gradient, value) = bounds::check_kalajpos(&metric, &boundary, &grid, tol)?;
    let pairs = bounds::random_pairs(seed, pair_count.max(1), radius);
    let distance = bounds::check_distance_contraction(&metric, &boundary, &pairs, tol)?;
    let reports = [main, gradient, value, distance];
    for r in &reports {
        art.add(&format!("{}.csv", r.bound_name), r.to_csv());
    }
    let passed = reports.iter().all(|r| !r.is_failure());
    let min_slack = reports[0].min_slack;
    Ok(Outcome {
        summary: json!({
            "metric": metric_spec,
            "boundary": boundary_spec,
            "radius": radius,
            "min_slack": min_slack,
            "reports": reports.iter().map(report_summary).collect::<Vec<_>>(),
        }),
        passed,
    })
}

fn lemma_command(which: LemmaKind, trials: usize, grid_points: usize, metric: Option<&Path>, seed: u64, tol: &Tolerances, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    match which {
        LemmaKind::Propi1 => {
            let summary = lemma::propi1_oracle(trials, seed, grid_points, tol.check_slack)?;
            let identity = lemma::propi1_slack(&lemma::LogConcaveDiffeo::identity(), &lemma::lemma_grid(grid_points));
            art.add("failures.json", serde_json::to_string_pretty(&summary.failures)?);
            let passed = summary.failures.is_empty() && identity.equality_everywhere;
            Ok(Outcome {
                summary: json!({
                    "which": "propi1",
                    "seed": seed,
                    "trials": summary.trials,
                    "grid_points": summary.grid_points,
                    "min_slack": summary.min_slack,
                    "worst_seed": summary.worst_seed,
                    "failure_count": summary.failures.len(),
                    "identity": identity,
                }),
                passed,
            })
        }
        LemmaKind::Lema => {
            let path = metric.context("lemma --which lema needs --metric")?;
            let (metric, spec) = read_metric(path)?;
            let probe = LemaProbe::new(&metric)?;
            let mut rows = Vec::with_capacity(grid_points);
            let (mut min_slack, mut argmin) = (f64::INFINITY, 0.0);
            for v in lemma::lemma_grid(grid_points) {
                let s = probe.slack(v)?;
                if s < min_slack {
                    (min_slack, argmin) = (s, v);
                }
                rows.push([v, s]);
            }
            art.add("lema.csv", csv("v,slack", rows));
            Ok(Outcome {
                summary: json!({ "which": "lema", "metric": spec, "mass": probe.mass(), "min_slack": min_slack, "argmin": argmin }),
                passed: min_slack >= -tol.check_slack,
            })
        }
    }
}

fn sweep(family: SweepFamily, cmd: &Command, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let Command::Sweep { n_max, k_max, k_count, x_max, x_count, .. } = *cmd else { unreachable!() };
    match family {
        SweepFamily::Psi => {
            let records = lemma::sharpness_sweep(n_max)?;
            let p = |r: &lemma::SweepRecord, k: &str| r.parameters[k];
            art.add("psi_sweep.csv", csv("n,s,u,ratio", records.iter().map(|r| [p(r, "n"), p(r, "s"), p(r, "u"), r.ratio])));
            let monotone = records.windows(2).all(|w| w[1].ratio > w[0].ratio);
            let max = records.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
            let last = records.last().map(|r| r.ratio);
            Ok(Outcome {
                summary: json!({ "family": "psi", "n_max": n_max, "monotone": monotone, "max_ratio": max, "final_ratio": last }),
                passed: monotone && max <= 1.0 + 1e-12,
            })
        }
        SweepFamily::RRatio => {
            let records = lemma::r_ratio_sweep(k_max, k_count, x_max, x_count)?;
            art.add("r_ratio.csv", csv("k,x,r_ratio", records.iter().map(|r| [r.parameters["k"], r.parameters["x"], r.ratio])));
            let max = records.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
            Ok(Outcome {
                summary: json!({ "family": "r_ratio", "k_max": k_max, "k_count": k_count, "x_max": x_max, "x_count": x_count, "max_ratio": max }),
                passed: max <= 1.0 + 1e-9,
            })
        }
    }
}

fn gallery_command(name: Example, n: u32, c: f64, k: f64, tol: &Tolerances, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    let report: ExampleReport = match name {
        Example::NegativeCurvature => gallery::run_negative_curvature_example(n)?,
        Example::ZeroCurvature => {
            let boundary = BoundaryData::random_smooth(0, tol.sample_count)?;
            gallery::run_zero_curvature_example(c, &boundary, &bounds::ring_grid(24, 96, tol.eval_radius))?
        }
        Example::Strip => gallery::run_strip_example(k)?,
        Example::HalfPlane => gallery::run_halfplane_example()?,
    };
    for t in &report.traces {
        art.add(&format!("{}.csv", t.name), t.to_csv());
    }
    let passed = report.reproduced && report.violations.is_empty();
    Ok(Outcome { summary: serde_json::to_value(&report)?, passed })
}

fn dispatch(cli: &Cli, tol: &Tolerances, art: &mut Artifacts) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Curvature { metric, grid_n } => curvature(metric, *grid_n, art),
        Command::Transform { metric, grid_n } => transform(metric, *grid_n, tol, art),
        Command::Solve { problem, grid_n } => solve(problem, *grid_n, tol, art),
        Command::CheckBounds { problem, radius, pairs } => check_bounds(problem, *radius, *pairs, cli.seed, tol, art),
        Command::Lemma { which, trials, grid_points, metric } => lemma_command(*which, *trials, *grid_points, metric.as_deref(), cli.seed, tol, art),
        Command::Sweep { family, .. } => sweep(*family, &cli.command, art),
        Command::Gallery { name, n, c, k } => gallery_command(*name, *n, *c, *k, tol, art),
    }
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Curvature { .. } => "curvature",
        Command::Transform { .. } => "transform",
        Command::Solve { .. } => "solve",
        Command::CheckBounds { .. } => "check-bounds",
        Command::Lemma { .. } => "lemma",
        Command::Sweep { .. } => "sweep",
        Command::Gallery { .. } => "gallery",
    }
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    kind: &'a str,
    message: String,
}

/// Numerical failures exit with 3; everything else that stops a run is an input error.
fn numeric_failure(e: &anyhow::Error) -> Option<&Error> {
    e.downcast_ref::<Error>().filter(|e| !matches!(e, Error::Parse(_) | Error::InvalidInput(_) | Error::ParameterOutOfRange(_) | Error::PreconditionViolated(_)))
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NonIntegrable(_) => "non_integrable",
        Error::NoConvergence { .. } => "no_convergence",
        Error::NumericInversionFailure { .. } => "numeric_inversion_failure",
        Error::Domain { .. } => "domain",
        Error::OutOfRange { .. } => "out_of_range",
        Error::OutsideDisk { .. } | Error::StencilOutsideDisk { .. } => "outside_disk",
        Error::DerivativeUnavailable { .. } => "derivative_unavailable",
        _ => "other",
    }
}

fn write_metadata(cli: &Cli) -> anyhow::Result<()> {
    let seconds = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let metadata = json!({
        "timestamp_unix": seconds,
        "version": env!("CARGO_PKG_VERSION"),
        "arguments": std::env::args().collect::<Vec<_>>(),
    });
    fs::create_dir_all(&cli.out)?;
    fs::write(cli.out.join("metadata.json"), serde_json::to_string_pretty(&metadata)?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let tol = match parse_tolerances(&cli.tolerances) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut art = Artifacts::default();
    let result = dispatch(&cli, &tol, &mut art);
    if let Err(e) = write_metadata(&cli) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match result {
        Ok(outcome) => {
            let summary = json!({
                "command": command_name(&cli.command),
                "seed": cli.seed,
                "tolerances": tol,
                "passed": outcome.passed,
                "result": outcome.summary,
            });
            art.add("summary.json", serde_json::to_string_pretty(&summary).unwrap() + "\n");
            if let Err(e) = art.write(&cli.out) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            println!("{}: {}", command_name(&cli.command), if outcome.passed { "pass" } else { "fail" });
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => match numeric_failure(&e) {
            Some(err) => {
                let record = ErrorRecord { error: command_name(&cli.command), kind: error_kind(err), message: err.to_string() };
                let text = serde_json::to_string_pretty(&record).unwrap();
                let _ = fs::write(cli.out.join("error.json"), &text);
                eprintln!("{text}");
                ExitCode::from(3)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}
