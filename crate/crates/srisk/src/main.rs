//! Command-line harness for the risk-estimation library: point estimates,
//! analytic oracles, concentration bounds, and the seeded Monte Carlo /
//! bandit experiment drivers.
//!
//! Exit codes: 0 on success, 2 on configuration errors (bad flags, specs,
//! or files), 3 on numerical failures (an oracle or calibration that cannot
//! reach its requested accuracy).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use srisk::bandit::RiskFunctional;
use srisk::bounds::{cvar_bound, CvarCase, TailBoundReport};
use srisk::dist::DistModel;
use srisk::estimators::{classic_cvar, cvar_trapz, cvar_trapz_truncated};
use srisk::harness::{
    benchmark_route_env, run_bai, run_coverage, run_curve, run_table, srm_estimate, BaiConfig,
    ExperimentConfig, ExperimentKind, Truncation,
};
use srisk::report::{emit, OutputFormat, Row};
use srisk::samples::OrderedSamples;
use srisk::seeds::child_seed;
use srisk::spectrum::Spectrum;
use srisk::{bounds, Error};

#[derive(Parser)]
#[command(
    name = "srisk",
    version,
    about = "Spectral risk, CVaR, and VaR estimation with concentration bounds and \
             risk-driven best-arm identification"
)]
struct Cli {
    /// Base seed; all randomness derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write rows to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Row format: csv or jsonl.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    /// Truncate samples at the family threshold: zero, clip, or off.
    /// Defaults to off, except for `coverage` where the estimator under
    /// study is the truncated one (zero unless overridden).
    #[arg(long, global = true)]
    trunc: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GridArgs {
    /// Distribution spec(s), e.g. gaussian:0,10 exp:0.2 uniform:-1,1 point:3.
    #[arg(long = "dist")]
    dists: Vec<String>,

    /// Spectrum spec: expk:K, cvar:ALPHA, or custom:FILE.
    #[arg(long)]
    spectrum: Option<String>,

    /// Sample sizes (comma-separated or repeated).
    #[arg(long = "n", value_delimiter = ',')]
    n_list: Vec<usize>,

    /// Subdivision counts (for coverage: a floor below the theorem's min_m).
    #[arg(long = "m", value_delimiter = ',')]
    m_list: Vec<usize>,

    /// Accuracies ε (coverage only; auto-calibrated when omitted).
    #[arg(long = "epsilon", value_delimiter = ',')]
    epsilon_list: Vec<f64>,

    /// Monte Carlo replications per cell.
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// One or more estimates from a sample file or a generated batch.
    Estimate {
        /// Distribution to draw the batch from (requires --n).
        #[arg(long)]
        dist: Option<String>,
        /// Sample file: plain text, one real per line.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Spectrum for the SRM estimator.
        #[arg(long, default_value = "expk:5")]
        spectrum: String,
        /// Batch size when generating from --dist.
        #[arg(long)]
        n: Option<usize>,
        /// Trapezoid subdivisions.
        #[arg(long, default_value_t = 100)]
        m: usize,
        /// Statistic: srm, cvar, or cvar-classic.
        #[arg(long, default_value = "srm")]
        estimator: String,
        /// CVaR level for the cvar estimators.
        #[arg(long, default_value_t = 0.95)]
        alpha: f64,
        /// Number of replications (row i uses seed child(seed, i)).
        #[arg(long, default_value_t = 1)]
        reps: usize,
    },

    /// Analytic SRM (or CVaR with --alpha) of known distributions.
    Oracle {
        /// Distribution spec(s).
        #[arg(long = "dist", required = true)]
        dists: Vec<String>,
        /// Spectrum for the SRM oracle.
        #[arg(long, default_value = "expk:5")]
        spectrum: String,
        /// Compute CVaR at this level instead of the spectrum SRM.
        #[arg(long)]
        alpha: Option<f64>,
        /// Absolute quadrature tolerance.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },

    /// Evaluate a concentration bound; prints one JSON object per ε.
    Bound {
        /// Distribution spec (selects the bound family).
        #[arg(long)]
        dist: String,
        /// Spectrum spec (SRM bounds).
        #[arg(long, default_value = "expk:5")]
        spectrum: String,
        /// Sample size.
        #[arg(long)]
        n: usize,
        /// Accuracies ε.
        #[arg(long = "epsilon", value_delimiter = ',', required = true)]
        epsilon_list: Vec<f64>,
        /// Evaluate the CVaR bound at this level instead of the SRM bound.
        #[arg(long)]
        alpha: Option<f64>,
        /// Use the second-derivative (K2) variant for bounded support.
        #[arg(long, default_value_t = false)]
        second: bool,
    },

    /// Estimation error versus sample size (one curve per m).
    Curve(GridArgs),

    /// Oracle versus Monte Carlo estimate per distribution.
    Table(GridArgs),

    /// Empirical tail frequency versus concentration bound.
    Coverage(GridArgs),

    /// Successive-rejects best-arm identification study.
    Bai {
        /// Environment file: one arm per line as family:params, optional
        /// `best <idx>` line. Defaults to the built-in five-route benchmark.
        #[arg(long)]
        env: Option<PathBuf>,
        /// Sampling budget per run.
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        /// Trapezoid subdivisions for the risk estimates.
        #[arg(long, default_value_t = 100)]
        subdivisions: usize,
        /// Arm statistic: mean, cvar:ALPHA, or srm:SPECTRUM.
        #[arg(long, default_value = "srm:expk:5")]
        functional: String,
        /// Number of independent runs.
        #[arg(long, default_value_t = 500)]
        runs: usize,
        /// Declare the correct arm, overriding the analytic minimizer.
        #[arg(long)]
        best: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Numerical { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> srisk::Result<()> {
    let format = OutputFormat::parse(&cli.format)?;
    let trunc = cli.trunc.as_deref().map(Truncation::parse).transpose()?;
    let out = cli.out.as_deref();

    match cli.command {
        Command::Estimate { dist, input, spectrum, n, m, estimator, alpha, reps } => {
            let spectrum = Spectrum::parse(&spectrum)?;
            let trunc = trunc.unwrap_or(Truncation::Off);
            if reps == 0 {
                return Err(Error::Config("--reps must be at least 1".into()));
            }

            let dist = dist.as_deref().map(DistModel::parse).transpose()?;
            let mut rows = Vec::with_capacity(reps);
            for rep in 0..reps {
                let rep_seed = child_seed(cli.seed, rep as u64);
                let (samples, source) = match (&dist, &input) {
                    (Some(d), None) => {
                        let n = n.ok_or_else(|| {
                            Error::Config("generating a batch from --dist requires --n".into())
                        })?;
                        (d.sample(n, rep_seed)?, d.to_string())
                    }
                    (None, Some(path)) => {
                        if reps > 1 {
                            return Err(Error::Config(
                                "--reps > 1 only makes sense with a generated batch".into(),
                            ));
                        }
                        let text = std::fs::read_to_string(path)?;
                        (OrderedSamples::from_text(&text)?, format!("file:{}", path.display()))
                    }
                    _ => {
                        return Err(Error::Config(
                            "estimate needs exactly one of --dist or --input".into(),
                        ))
                    }
                };

                let (label, value) = match estimator.as_str() {
                    "srm" => (
                        format!("srm:{}", spectrum.label()),
                        srm_estimate(&samples, &spectrum, m, dist.as_ref(), trunc)?,
                    ),
                    "cvar" => {
                        let value = match (trunc, &dist) {
                            (Truncation::Off, _) => cvar_trapz(&samples, alpha, m)?,
                            (Truncation::On(mode), Some(d)) => {
                                cvar_trapz_truncated(&samples, alpha, m, d, mode)?
                            }
                            (Truncation::On(_), None) => {
                                return Err(Error::Config(
                                    "truncation needs a known distribution family; \
                                     supply --dist or pass --trunc off"
                                        .into(),
                                ))
                            }
                        };
                        (format!("cvar:{alpha}"), value)
                    }
                    "cvar-classic" => (format!("cvar-classic:{alpha}"), classic_cvar(&samples, alpha)?),
                    other => {
                        return Err(Error::Config(format!(
                            "unknown estimator {other:?}; expected srm, cvar, or cvar-classic"
                        )))
                    }
                };

                rows.push(
                    Row::new()
                        .str("experiment", ExperimentKind::Estimate.label())
                        .str("source", source)
                        .str("estimator", label)
                        .str("trunc", trunc.label())
                        .int("n", samples.n() as i64)
                        .int("m", m as i64)
                        .int("rep", rep as i64)
                        .uint("seed", cli.seed)
                        .num("estimate", value),
                );
            }
            emit(&rows, format, out)
        }

        Command::Oracle { dists, spectrum, alpha, tol } => {
            let spectrum = Spectrum::parse(&spectrum)?;
            let mut rows = Vec::new();
            for spec in &dists {
                let dist = DistModel::parse(spec)?;
                let (functional, value) = match alpha {
                    Some(alpha) => (format!("cvar:{alpha}"), dist.analytic_cvar(alpha)?),
                    None => (format!("srm:{}", spectrum.label()), dist.analytic_srm(&spectrum, tol)?),
                };
                rows.push(
                    Row::new()
                        .str("experiment", ExperimentKind::Oracle.label())
                        .str("dist", dist.to_string())
                        .str("functional", functional)
                        .num("value", value),
                );
            }
            emit(&rows, format, out)
        }

        Command::Bound { dist, spectrum, n, epsilon_list, alpha, second } => {
            let dist = DistModel::parse(&dist)?;
            let spectrum = Spectrum::parse(&spectrum)?;
            let mut rows = Vec::new();
            for &epsilon in &epsilon_list {
                let report = evaluate_bound(&dist, &spectrum, n, epsilon, alpha, second)?;
                rows.push(bound_row(&report));
            }
            // The bound report contract is one JSON object per line.
            emit(&rows, OutputFormat::Jsonl, out)
        }

        Command::Curve(args) => {
            let cfg = grid_config(ExperimentConfig::curve_defaults(cli.seed), args, trunc)?;
            let rows: Vec<Row> = run_curve(&cfg)?.iter().map(|p| p.to_row()).collect();
            emit(&rows, format, out)
        }

        Command::Table(args) => {
            let cfg = grid_config(ExperimentConfig::table_defaults(cli.seed), args, trunc)?;
            let rows: Vec<Row> = run_table(&cfg)?.iter().map(|r| r.to_row()).collect();
            emit(&rows, format, out)
        }

        Command::Coverage(args) => {
            let cfg = grid_config(ExperimentConfig::coverage_defaults(cli.seed), args, trunc)?;
            let rows: Vec<Row> = run_coverage(&cfg)?.iter().map(|r| r.to_row()).collect();
            emit(&rows, format, out)
        }

        Command::Bai { env, budget, subdivisions, functional, runs, best } => {
            let mut env = match env {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    srisk::bandit::ArmEnv::parse_text(&text, cli.seed)?
                }
                None => benchmark_route_env(cli.seed),
            };
            if let Some(best) = best {
                env = env.with_declared_best(best)?;
            }
            let cfg = BaiConfig {
                env,
                functional: RiskFunctional::parse(&functional)?,
                budget,
                m: subdivisions,
                runs,
                base_seed: cli.seed,
            };
            let summary = run_bai(&cfg)?;
            emit(&summary.to_rows(), format, out)?;
            println!("{}", summary.summary_line());
            Ok(())
        }
    }
}

/// Applies non-empty grid flags over a driver's defaults.
fn grid_config(
    mut cfg: ExperimentConfig,
    args: GridArgs,
    trunc: Option<Truncation>,
) -> srisk::Result<ExperimentConfig> {
    if !args.dists.is_empty() {
        cfg.dists = args
            .dists
            .iter()
            .map(|spec| DistModel::parse(spec))
            .collect::<srisk::Result<_>>()?;
    }
    if let Some(spec) = &args.spectrum {
        cfg.spectrum = Spectrum::parse(spec)?;
    }
    if !args.n_list.is_empty() {
        cfg.n_list = args.n_list;
    }
    if !args.m_list.is_empty() {
        cfg.m_list = args.m_list;
    }
    if !args.epsilon_list.is_empty() {
        cfg.epsilon_list = args.epsilon_list;
    }
    if let Some(reps) = args.reps {
        cfg.replications = reps;
    }
    if let Some(trunc) = trunc {
        cfg.trunc = trunc;
    }
    Ok(cfg)
}

/// Picks the family-appropriate bound (SRM, or CVaR when `alpha` is given).
fn evaluate_bound(
    dist: &DistModel,
    spectrum: &Spectrum,
    n: usize,
    epsilon: f64,
    alpha: Option<f64>,
    second: bool,
) -> srisk::Result<TailBoundReport> {
    use srisk::estimators::truncation_threshold;

    match alpha {
        None => match *dist {
            DistModel::Uniform { hi, .. } => {
                let k = bounds::compute_constants(dist, spectrum, hi)?;
                let kind = if second {
                    bounds::BoundedKind::SecondDeriv
                } else {
                    bounds::BoundedKind::FirstDeriv
                };
                bounds::srm_bound_bounded(kind, n, epsilon, &k)
            }
            DistModel::Gaussian { mean, sigma } => {
                if mean != 0.0 {
                    return Err(Error::Config(
                        "the Gaussian concentration bound assumes mean zero".into(),
                    ));
                }
                let b = truncation_threshold(dist, n)?;
                let k = bounds::compute_constants(dist, spectrum, b)?;
                bounds::srm_bound_gaussian(n, epsilon, sigma, sigma, &k)
            }
            DistModel::Exponential { rate } => {
                let b = truncation_threshold(dist, n)?;
                let k = bounds::compute_constants(dist, spectrum, b)?;
                bounds::srm_bound_exponential(n, epsilon, rate, rate, &k)
            }
            DistModel::PointMass { .. } => {
                Err(Error::Config("concentration bounds need a continuous distribution".into()))
            }
        },
        Some(alpha) => {
            let flat = Spectrum::flat();
            match *dist {
                DistModel::Uniform { hi, .. } => {
                    let k = bounds::compute_constants_over(dist, &flat, hi, alpha)?;
                    let case = if second { CvarCase::BoundedSecond } else { CvarCase::BoundedFirst };
                    cvar_bound(&case, alpha, n, epsilon, &k)
                }
                DistModel::Gaussian { mean, sigma } => {
                    if mean != 0.0 {
                        return Err(Error::Config(
                            "the Gaussian concentration bound assumes mean zero".into(),
                        ));
                    }
                    let b = truncation_threshold(dist, n)?;
                    let k = bounds::compute_constants_over(dist, &flat, b, alpha)?;
                    cvar_bound(&CvarCase::Gaussian { sigma, sigma_max: sigma }, alpha, n, epsilon, &k)
                }
                DistModel::Exponential { rate } => {
                    let b = truncation_threshold(dist, n)?;
                    let k = bounds::compute_constants_over(dist, &flat, b, alpha)?;
                    cvar_bound(
                        &CvarCase::Exponential { lambda: rate, lambda_min: rate },
                        alpha,
                        n,
                        epsilon,
                        &k,
                    )
                }
                DistModel::PointMass { .. } => {
                    Err(Error::Config("concentration bounds need a continuous distribution".into()))
                }
            }
        }
    }
}

/// The pinned JSON shape of a bound report: {case, n, epsilon, bound, valid, min_m}.
fn bound_row(report: &TailBoundReport) -> Row {
    Row::new()
        .str("case", report.case)
        .int("n", report.n as i64)
        .num("epsilon", report.epsilon)
        .num("bound", report.bound)
        .bool("valid", report.valid)
        .num("min_m", report.min_m)
}
