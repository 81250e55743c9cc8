// SPDX-License-Identifier: MIT OR Apache-2.0

//! `notseg` command-line tool.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use notseg::path::SolutionPath;
use notseg::select::{DEFAULT_ALPHA, DEFAULT_Q_MAX};
use notseg::simulate::ModelId;
use notseg::{
    draw_ensemble, fit_segments, gen_noise, gen_signal, mad_sigma, not_detect, run_bench, select_on_path,
    solution_path, ssic_score, BenchConfig, ChangePointSet, DetectionConfig, NoiseKind, NoiseSpec, Scenario,
    TimeSeries,
};
use serde_json::{json, Value};

use crate::io::{read_series, write_output, CliError};

const SCHEMA: &str = "notseg/1";

#[derive(Parser)]
#[command(name = "notseg", version, about = "Narrowest-over-threshold change-point detection")]
struct Cli {
    /// Worker threads (default: one per core). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect change-points, by sSIC selection or at a fixed threshold.
    Detect(DetectArgs),
    /// Compute the solution path over all thresholds.
    Path(PathArgs),
    /// Generate one of the built-in test signals plus noise.
    Simulate(SimulateArgs),
    /// Monte-Carlo benchmark on a built-in test signal.
    Bench(BenchArgs),
    /// Refit segment parameters for given change-points.
    Fit(FitArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Io {
    /// Input CSV, one value per line (optional header); `-` reads stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct Search {
    /// pcws-const | pcws-lin-cont | pcws-lin | mean-var | pcws-quad | pcws-const-ht
    #[arg(long, default_value = "pcws-const")]
    scenario: String,
    /// Number of random intervals.
    #[arg(long, default_value_t = notseg::sampler::DEFAULT_M)]
    m: usize,
    #[arg(long, env = "NOTSEG_SEED", default_value_t = 0)]
    seed: u64,
    /// Known noise standard deviation; estimated by MAD when absent.
    #[arg(long)]
    sigma: Option<f64>,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    search: Search,
    /// Fixed threshold, in units of the noise standard deviation for the
    /// scale-equivariant scenarios. Without it the model is chosen by sSIC.
    #[arg(long)]
    threshold: Option<f64>,
    /// sSIC penalty exponent.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Largest number of change-points considered by sSIC.
    #[arg(long, default_value_t = DEFAULT_Q_MAX)]
    q_max: usize,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    io: Io,
    #[command(flatten)]
    search: Search,
    /// Only report models with at most this many change-points.
    #[arg(long, default_value_t = DEFAULT_Q_MAX)]
    q_max: usize,
    /// Report every model regardless of size.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// teeth | blocks | wave1 | wave2 | mix | vol | quad | smile
    #[arg(long)]
    model: String,
    /// gauss | laplace | t5 | ar1
    #[arg(long, default_value = "gauss")]
    noise: String,
    /// Standard deviation of Gaussian noise.
    #[arg(long, default_value_t = 1.0)]
    sd: f64,
    #[arg(long, env = "NOTSEG_SEED", default_value_t = 0)]
    seed: u64,
    /// Also write the index, signal and noise scale (CSV only).
    #[arg(long)]
    truth: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    model: String,
    #[arg(long, default_value = "gauss")]
    noise: String,
    #[arg(long, default_value_t = 1.0)]
    sd: f64,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    /// Comma-separated candidate scenarios; the model's own by default.
    #[arg(long, value_delimiter = ',')]
    scenarios: Vec<String>,
    #[arg(long, default_value_t = notseg::sampler::DEFAULT_M)]
    m: usize,
    #[arg(long, env = "NOTSEG_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_Q_MAX)]
    q_max: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    io: Io,
    /// A `detect` result to take the scenario and change-points from.
    #[arg(long, conflicts_with_all = ["change_points", "scenario"])]
    model: Option<PathBuf>,
    /// Comma-separated change-points (last index of each segment).
    #[arg(long, value_delimiter = ',')]
    change_points: Vec<usize>,
    #[arg(long, default_value = "pcws-const")]
    scenario: String,
}

fn scenario(name: &str) -> Result<Scenario, CliError> {
    name.parse().map_err(CliError::from)
}

/// Noise scale used to standardise the data, or `None` when the scenario is
/// not scale-equivariant or the estimate degenerates.
fn standardise(y: &TimeSeries, sc: Scenario, sigma: Option<f64>) -> Result<(TimeSeries, Option<f64>), CliError> {
    let sigma_hat = match sigma {
        Some(s) if !(s.is_finite() && s > 0.0) => {
            return Err(CliError::Config(format!("--sigma must be positive, got {s}")))
        }
        Some(s) => s,
        None => mad_sigma(y, sc)?,
    };
    if sc.is_scale_equivariant() && sigma_hat > 0.0 {
        Ok((y.scaled(1.0 / sigma_hat)?, Some(sigma_hat)))
    } else {
        Ok((y.clone(), Some(sigma_hat).filter(|s| *s > 0.0)))
    }
}

fn detect(args: DetectArgs) -> Result<(), CliError> {
    let y = read_series(&args.io.input)?;
    let sc = scenario(&args.search.scenario)?;
    let (work, sigma_hat) = standardise(&y, sc, args.search.sigma)?;
    let ens = draw_ensemble(y.len(), args.search.m, sc, args.search.seed)?;
    let (method, cps, threshold_used) = match args.threshold {
        Some(zeta) => {
            if sc.is_scale_equivariant() && sigma_hat.is_none() {
                return Err(CliError::Config("noise scale estimate is zero; pass --sigma to use a threshold".into()));
            }
            let cps = not_detect(&work, &DetectionConfig::new(zeta, sc, ens))?;
            ("not", cps, zeta)
        }
        None => {
            let path = solution_path(&work, &ens, sc)?;
            let best = select_on_path(&y, &path, sc, args.alpha, args.q_max)?;
            let zeta = threshold_of(&path, &best.cps, args.q_max);
            ("not-ssic", best.cps, zeta)
        }
    };
    let scored = ssic_score(&y, &cps, sc, args.alpha)?;
    let fit = fit_segments(&y, &cps, sc)?;
    match args.io.format {
        Format::Json => {
            let out = json!({
                "schema": SCHEMA,
                "T": y.len(),
                "scenario": sc.name(),
                "method": method,
                "seed": args.search.seed,
                "m": args.search.m,
                "alpha": args.alpha,
                "change_points": cps.taus(),
                "threshold_used": threshold_used,
                "n_params": scored.n_params,
                "ssic": scored.ssic,
                "sigma_hat": sigma_hat,
                "fitted": fit.fitted,
            });
            write_output(args.io.output.as_deref(), &io::json_bytes(&out)?)
        }
        Format::Csv => {
            let marks: std::collections::HashSet<usize> = cps.taus().iter().copied().collect();
            let rows = y.values().iter().zip(&fit.fitted).enumerate().map(|(i, (v, f))| {
                vec![(i + 1).to_string(), v.to_string(), f.to_string(), u8::from(marks.contains(&(i + 1))).to_string()]
            });
            write_output(args.io.output.as_deref(), &io::csv_bytes(&["t", "y", "fitted", "change_point"], rows)?)
        }
    }
}

/// Smallest path threshold at which `cps` is the detection result.
fn threshold_of(path: &SolutionPath, cps: &ChangePointSet, q_max: usize) -> f64 {
    if cps.is_empty() {
        return path.end_threshold();
    }
    path.small_models(q_max).find(|(_, c)| c == cps).map_or(path.end_threshold(), |(z, _)| z)
}

fn path(args: PathArgs) -> Result<(), CliError> {
    let y = read_series(&args.io.input)?;
    let sc = scenario(&args.search.scenario)?;
    let (work, sigma_hat) = standardise(&y, sc, args.search.sigma)?;
    let ens = draw_ensemble(y.len(), args.search.m, sc, args.search.seed)?;
    let path = solution_path(&work, &ens, sc)?;
    let q_max = if args.all { usize::MAX } else { args.q_max };
    let models: Vec<(f64, ChangePointSet)> = path.small_models(q_max).collect();
    match args.io.format {
        Format::Json => {
            let list: Vec<Value> =
                models.iter().map(|(z, c)| json!({ "threshold": z, "change_points": c.taus() })).collect();
            let out = json!({
                "schema": SCHEMA,
                "T": y.len(),
                "scenario": sc.name(),
                "seed": args.search.seed,
                "m": args.search.m,
                "sigma_hat": sigma_hat,
                "end_threshold": path.end_threshold(),
                "models": list,
            });
            write_output(args.io.output.as_deref(), &io::json_bytes(&out)?)
        }
        Format::Csv => {
            let rows = models.iter().map(|(z, c)| {
                let taus: Vec<String> = c.taus().iter().map(ToString::to_string).collect();
                vec![z.to_string(), c.q().to_string(), taus.join(";")]
            });
            write_output(args.io.output.as_deref(), &io::csv_bytes(&["threshold", "q", "change_points"], rows)?)
        }
    }
}

fn model_id(name: &str) -> Result<ModelId, CliError> {
    name.parse().map_err(CliError::from)
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let model = model_id(&args.model)?;
    let kind = NoiseKind::parse(&args.noise, args.sd)?;
    let signal = gen_signal(model);
    let noise = gen_noise(NoiseSpec { kind, seed: args.seed }, signal.len);
    let y = notseg::simulate::observe(&signal, &noise)?;
    let bytes = match args.format {
        Format::Json => io::json_bytes(&json!({
            "schema": SCHEMA,
            "model": model.name(),
            "noise": kind,
            "seed": args.seed,
            "T": signal.len,
            "scenario": signal.scenario.name(),
            "true_change_points": signal.true_cps.taus(),
            "f": signal.f,
            "sigma": signal.sigma,
            "y": y,
        }))?,
        Format::Csv if args.truth => io::csv_bytes(
            &["t", "f", "sigma", "y"],
            (0..signal.len).map(|i| {
                vec![(i + 1).to_string(), signal.f[i].to_string(), signal.sigma[i].to_string(), y[i].to_string()]
            }),
        )?,
        Format::Csv => io::csv_bytes(&["y"], y.iter().map(|v| vec![v.to_string()]))?,
    };
    write_output(args.output.as_deref(), &bytes)
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let mut cfg = BenchConfig::new(model_id(&args.model)?, NoiseKind::parse(&args.noise, args.sd)?);
    cfg.scenarios = args.scenarios.iter().map(|s| scenario(s)).collect::<Result<_, _>>()?;
    cfg.reps = args.reps;
    cfg.m = args.m;
    cfg.seed = args.seed;
    cfg.alpha = args.alpha;
    cfg.q_max = args.q_max;
    let (report, _) = run_bench(&cfg)?;
    eprint!("{report}");
    let bytes = match args.format {
        Format::Json => io::json_bytes(&json!({ "schema": SCHEMA, "config": cfg, "report": report }))?,
        Format::Csv => {
            let mut header = vec!["model", "noise", "method", "replicates"];
            header.extend(notseg::metrics::QDiffHistogram::LABELS);
            header.extend(["avg_mse", "avg_dH", "avg_runtime_s"]);
            let mut row =
                vec![report.model.clone(), report.noise.clone(), report.method.clone(), report.replicates.to_string()];
            row.extend(report.q_diff_hist.0.iter().map(ToString::to_string));
            row.extend([report.avg_mse, report.avg_dh, report.avg_runtime_s].map(|v| v.to_string()));
            io::csv_bytes(&header, std::iter::once(row))?
        }
    };
    write_output(args.output.as_deref(), &bytes)
}

fn fit(args: FitArgs) -> Result<(), CliError> {
    let y = read_series(&args.io.input)?;
    let (sc, taus) = match &args.model {
        Some(file) => io::read_model(file)?,
        None => (scenario(&args.scenario)?, args.change_points.clone()),
    };
    let cps = ChangePointSet::from_unsorted(taus, y.len())?;
    let fit = fit_segments(&y, &cps, sc)?;
    match args.io.format {
        Format::Json => {
            let out = json!({
                "schema": SCHEMA,
                "T": y.len(),
                "scenario": sc.name(),
                "change_points": cps.taus(),
                "fitted": fit.fitted,
                "sigma_t": fit.sigma_t,
                "params": fit.params,
                "rss": fit.rss,
            });
            write_output(args.io.output.as_deref(), &io::json_bytes(&out)?)
        }
        Format::Csv => {
            let rows = fit
                .fitted
                .iter()
                .zip(&fit.sigma_t)
                .enumerate()
                .map(|(i, (f, s))| vec![(i + 1).to_string(), f.to_string(), s.to_string()]);
            write_output(args.io.output.as_deref(), &io::csv_bytes(&["t", "fitted", "sigma"], rows)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    let result = match cli.command {
        Command::Detect(a) => detect(a),
        Command::Path(a) => path(a),
        Command::Simulate(a) => simulate(a),
        Command::Bench(a) => bench(a),
        Command::Fit(a) => fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
