use std::path::{Path, PathBuf};
use std::process::ExitCode;

use astars_core::analytic::{MetricKind, SicMode};
use astars_core::model::NetworkConfig;
use astars_core::montecarlo::Scheme;
use astars_runner::config::{parse_config, parse_seed, render_config};
use astars_runner::error::{CliError, Result};
use astars_runner::figures;
use astars_runner::sweep::{self, grid, Axis, AxisValue, Operating, RunOptions, SweepSpec};
use astars_runner::validate::{self, ValidateOptions};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "astars",
    version,
    about = "Outage, rate and throughput of active STAR-surface NOMA links"
)]
struct Cli {
    /// Key = value configuration file; unset keys keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Monte Carlo trials per point (overrides mc_trials).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Seed, decimal or 0x hex (overrides seed).
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Use 1e6 trials per point.
    #[arg(long, global = true)]
    paper_scale: bool,
    /// Never write SVG plots.
    #[arg(long, global = true)]
    no_plots: bool,
    /// Write SVG plots for `sweep` too.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one axis and write one CSV per metric.
    Sweep(Box<SweepArgs>),
    /// Run the agreement, slope and ordering gates.
    Validate {
        /// Samples for the cascade CDF budget check.
        #[arg(long, default_value_t = 1_000_000)]
        cdf_samples: usize,
    },
    /// Regenerate the data of one figure preset.
    Figure { id: String },
    /// Print the effective configuration.
    ShowConfig,
}

#[derive(Args)]
struct SweepArgs {
    /// q_tot_dbm, ps_dbm, num_elements, amp_lambda or beta_r_x_a_r.
    #[arg(long, default_value = "q_tot_dbm")]
    axis: String,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Explicit comma-separated grid instead of start/stop/step. Power axes
    /// default to 0:2.5:50 dBm.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<f64>,
    /// β_r values for the beta_r_x_a_r axis.
    #[arg(long, value_delimiter = ',')]
    beta_r: Vec<f64>,
    /// a_r values for the beta_r_x_a_r axis.
    #[arg(long, value_delimiter = ',')]
    a_r: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "outage_r,outage_t")]
    metrics: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "psic,ipsic")]
    modes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "astars_noma")]
    schemes: Vec<String>,
    #[arg(long)]
    no_analytic: bool,
    #[arg(long)]
    no_mc: bool,
    /// Operating budget for non-power axes (dBm).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "ps_dbm")]
    budget_dbm: Option<f64>,
    /// Operating transmit power for non-power axes (dBm).
    #[arg(long, allow_hyphen_values = true)]
    ps_dbm: Option<f64>,
}

fn parse_list<T>(key: &str, items: &[String], f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    items
        .iter()
        .map(|s| f(s.trim()).ok_or_else(|| CliError::config(key, format!("unknown value {s:?}"))))
        .collect()
}

fn sweep_spec(a: &SweepArgs) -> Result<SweepSpec> {
    let axis = Axis::from_tag(&a.axis)
        .ok_or_else(|| CliError::config("axis", format!("unknown axis {:?}", a.axis)))?;
    let values = if axis == Axis::BetaRAr {
        if a.beta_r.is_empty() || a.a_r.is_empty() {
            return Err(CliError::config(
                "axis",
                "beta_r_x_a_r needs --beta-r and --a-r",
            ));
        }
        a.beta_r
            .iter()
            .flat_map(|&b| a.a_r.iter().map(move |&r| AxisValue::Pair(b, r)))
            .collect()
    } else if !a.values.is_empty() {
        a.values.iter().map(|&v| AxisValue::Scalar(v)).collect()
    } else {
        match (a.start, a.stop, a.step) {
            (Some(s), Some(e), Some(d)) => {
                grid(s, e, d)?.into_iter().map(AxisValue::Scalar).collect()
            }
            (None, None, None) if matches!(axis, Axis::QTotDbm | Axis::PsDbm) => {
                grid(0.0, 50.0, 2.5)?
                    .into_iter()
                    .map(AxisValue::Scalar)
                    .collect()
            }
            _ => {
                return Err(CliError::config(
                    "grid",
                    "give --values or all of --start, --stop, --step",
                ))
            }
        }
    };
    let operating = match (a.budget_dbm, a.ps_dbm) {
        (_, Some(p)) => Operating::TransmitDbm(p),
        (Some(q), None) => Operating::BudgetDbm(q),
        (None, None) => Operating::BudgetDbm(30.0),
    };
    let spec = SweepSpec {
        axis,
        values,
        metrics: parse_list("metrics", &a.metrics, MetricKind::from_tag)?,
        modes: parse_list("modes", &a.modes, SicMode::from_tag)?,
        schemes: parse_list("schemes", &a.schemes, |s| Scheme::from_tag(s).ok())?,
        analytic: !a.no_analytic,
        monte_carlo: !a.no_mc,
        operating,
        note: None,
    };
    spec.validate()?;
    Ok(spec)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => parse_config(p)?,
        None => NetworkConfig::table_one(),
    };
    if cli.paper_scale {
        cfg.mc_trials = 1_000_000;
    }
    if let Some(t) = cli.trials {
        cfg.mc_trials = t;
    }
    if let Some(s) = &cli.seed {
        cfg.seed = parse_seed(s)?;
    }
    cfg.validate()?;
    let opts = RunOptions {
        trials: cfg.mc_trials,
        seed: cfg.seed,
    };
    let out: &Path = &cli.out;
    match cli.command {
        Command::ShowConfig => print!("{}", render_config(&cfg)),
        Command::Sweep(a) => {
            let spec = sweep_spec(&a)?;
            let res = sweep::run_sweep(&cfg, &spec, opts)?;
            report(&sweep::write_outputs(
                &res,
                out,
                cli.svg && !cli.no_plots,
                spec.axis.tag(),
            )?);
        }
        Command::Figure { id } => {
            let fig = figures::preset(&id, &cfg)?;
            let root = out.join(fig.id);
            for run in &fig.runs {
                let res = sweep::run_sweep(&run.config, &run.spec, opts)?;
                let dir = if run.name.is_empty() {
                    root.clone()
                } else {
                    root.join(&run.name)
                };
                report(&sweep::write_outputs(&res, &dir, !cli.no_plots, fig.title)?);
            }
        }
        Command::Validate { cdf_samples } => {
            let vopts = ValidateOptions {
                cdf_samples,
                ..ValidateOptions::new(opts.trials, opts.seed)
            };
            std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
            let gates = validate::run_validate(&cfg, &vopts, Some(out), !cli.no_plots)?;
            print!("{}", validate::render_table(&gates));
            let failed = gates.iter().filter(|g| !g.pass).count();
            if failed > 0 {
                let err = CliError::GateFailure {
                    failed,
                    total: gates.len(),
                };
                eprintln!("error: {err}");
                return Ok(ExitCode::from(err.exit_code()));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the configuration exit code.
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
