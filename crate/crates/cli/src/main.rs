use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod data;

use config::{HpoMethod, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "kpicast",
    version,
    about = "Monthly hotel KPI forecasting with an LSTM"
)]
struct Cli {
    /// TOML run configuration (see docs/config.md).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for synthetic data and weight initialisation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// CSV file, or a directory of CSV files, with columns city,kpi,month,value.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Use the five built-in synthetic cities instead of input files.
    #[arg(long)]
    synth: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the synthetic city datasets as CSV.
    Synth {
        #[arg(long)]
        months: Option<usize>,
        /// First month, YYYY-MM.
        #[arg(long)]
        start: Option<String>,
    },
    /// Run the full pipeline and write forecasts, a report and a manifest.
    Run {
        #[command(flatten)]
        source: Source,
        /// Also write per-series wall-clock times to timings.csv. Off by
        /// default so repeated runs produce byte-identical output.
        #[arg(long)]
        timings: bool,
    },
    /// Search hyperparameters for one (city, KPI) series.
    Hpo {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        city: Option<String>,
        #[arg(long)]
        kpi: Option<String>,
        #[arg(long, value_enum)]
        method: Option<HpoMethod>,
        /// Evaluations for Bayesian search.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Check analytic gradients against central finite differences.
    Gradcheck {
        #[arg(long, default_value_t = 20)]
        models: usize,
        #[arg(long, default_value_t = kpicast::lstm::gradcheck::DEFAULT_EPSILON)]
        epsilon: f64,
        /// Perturb the analytic gradient (negative control).
        #[arg(long, hide = true)]
        corrupt_gradient: bool,
    },
    /// Re-render a saved report.csv as a text table.
    Report { path: PathBuf },
}

pub struct Ctx {
    pub config: RunConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub quiet: bool,
}

impl Ctx {
    pub fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` is a completed command that found failures (exit 1);
/// `Err` is a usage, configuration or IO problem (exit 2).
fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = config.resolve_seed(cli.seed);
    let ctx = Ctx {
        config,
        seed,
        out: cli
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from("kpicast-out")),
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Synth { months, start } => commands::synth(ctx, months, start),
        Command::Run { source, timings } => commands::run(ctx, &source, timings),
        Command::Hpo {
            source,
            city,
            kpi,
            method,
            budget,
        } => commands::hpo(ctx, &source, city, kpi, method, budget),
        Command::Gradcheck {
            models,
            epsilon,
            corrupt_gradient,
        } => commands::gradcheck(&ctx, models, epsilon, corrupt_gradient),
        Command::Report { path } => commands::report(&path, cli.out.as_deref()),
    }
}
