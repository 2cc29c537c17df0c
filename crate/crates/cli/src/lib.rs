//! `hilmod`: verification suites and experiment runners over `A^N`.
//!
//! ```text
//! hilmod verify --suite all --seed 42
//! hilmod experiment counterexample --alg-dim 16 --trunc 16 --weights geometric:0.5 --kmax 12 --format csv
//! hilmod experiment witness --op identity --alg-dim 2 --trunc 32 --steps 3 --horizon 24
//! hilmod experiment probe --op theta --epsilon 0.25 --samples 500,2000
//! hilmod net --points basis --trunc 16 --epsilon 0.5
//! ```
//!
//! Exit codes: 0 all checks passed, 1 an inequality was violated (named on
//! stderr and in the report), 2 usage or config error, 3 numeric
//! non-convergence. `HILMOD_THREADS` caps the worker threads (0 or unset:
//! one per core).

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod scenario;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{AlgebraLayer, ConfigLayer, ExperimentConfig, Format, Kind, OutputLayer, WeightsSpec};
use crate::error::{exit, CliError};
use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "hilmod",
    version,
    about = "Seminorm topologies and compactness on truncated Hilbert modules"
)]
pub struct Cli {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Slack for exact identities (defaults to 1e-10).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Omit the timestamp so reruns compare byte for byte.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a property suite; exit 0 iff every check passes.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Run one experiment and write its report.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[command(flatten)]
        params: Params,
    },
    /// Greedy ε-net of a point set mapped through an operator.
    Net {
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ExperimentKind {
    Counterexample,
    Witness,
    Probe,
    Separation,
}

impl From<ExperimentKind> for Kind {
    fn from(k: ExperimentKind) -> Kind {
        match k {
            ExperimentKind::Counterexample => Kind::Counterexample,
            ExperimentKind::Witness => Kind::Witness,
            ExperimentKind::Probe => Kind::Probe,
            ExperimentKind::Separation => Kind::Separation,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// Matrix size n of A = M_n(C).
    #[arg(long)]
    pub alg_dim: Option<usize>,
    /// Use the diagonal subalgebra of M_n(C).
    #[arg(long)]
    pub commutative: Option<bool>,
    /// Truncation N.
    #[arg(long)]
    pub trunc: Option<usize>,
    /// `geometric:r`, `uniform` or a comma-separated list.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// `identity`, `zero`, `proj:k`, `theta`, `diag` or `file:PATH`.
    #[arg(long = "op")]
    pub operator: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub samples: Option<Vec<usize>>,
    /// `basis:k:c` or `random:r`.
    #[arg(long)]
    pub point: Option<String>,
    /// `basis`, `ball:COUNT` or `file:PATH`.
    #[arg(long)]
    pub points: Option<String>,
    /// Seminorm as inline JSON.
    #[arg(long)]
    pub seminorm: Option<String>,
}

impl Cli {
    fn flag_layer(&self, params: &Params) -> Result<ConfigLayer, CliError> {
        Ok(ConfigLayer {
            algebra: AlgebraLayer {
                dim: params.alg_dim,
                commutative: params.commutative,
            },
            truncation: params.trunc,
            seed: self.seed,
            tolerance: self.tol,
            weights: params.weights.as_deref().map(WeightsSpec::parse).transpose()?,
            k_max: params.kmax,
            operator: params.operator.clone(),
            steps: params.steps,
            horizon: params.horizon,
            epsilon: params.epsilon,
            samples: params.samples.clone(),
            point: params.point.clone(),
            points: params.points.clone(),
            seminorm: params
                .seminorm
                .as_deref()
                .map(|s| serde_json::from_str(s).map_err(|e| CliError::config("seminorm", e.to_string())))
                .transpose()?,
            output: OutputLayer {
                format: self.format,
                path: self.out.clone(),
            },
        })
    }

    fn file_layer(&self) -> Result<ConfigLayer, CliError> {
        match &self.config {
            Some(path) => ConfigLayer::from_file(path),
            None => Ok(ConfigLayer::default()),
        }
    }
}

/// Builds the global thread pool from `HILMOD_THREADS`.
pub fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var("HILMOD_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::config("HILMOD_THREADS", format!("`{v}` is not a thread count")))?,
        _ => 0,
    };
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    configure_threads()?;
    let timestamp = !cli.no_timestamp;
    let outcome = match &cli.command {
        Command::Verify { suite } => {
            let file = cli.file_layer()?;
            let layer = file.overlay(cli.flag_layer(&Params::default())?);
            let tol = layer.tolerance.unwrap_or(config::DEFAULT_TOLERANCE);
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::config("tolerance", "must be positive and finite"));
            }
            let format = layer.output.format.unwrap_or(Format::Json);
            let outcome = commands::verify(
                *suite,
                layer.seed.unwrap_or(config::DEFAULT_SEED),
                tol,
                format,
                timestamp,
            )?;
            commands::write(&outcome, layer.output.path.as_deref())?;
            outcome
        }
        Command::Experiment { kind, params } => run_kind((*kind).into(), cli, params, timestamp)?,
        Command::Net { params } => run_kind(Kind::Net, cli, params, timestamp)?,
    };
    Ok(outcome.passed)
}

fn run_kind(kind: Kind, cli: &Cli, params: &Params, timestamp: bool) -> Result<commands::Outcome, CliError> {
    let config = ExperimentConfig::resolve(kind, cli.file_layer()?, cli.flag_layer(params)?)?;
    let outcome = commands::experiment(&config, timestamp)?;
    commands::write(&outcome, config.output.path.as_deref())?;
    Ok(outcome)
}

/// Parses `args` (including the program name), runs and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::PASS };
        }
    };
    match execute(&cli) {
        Ok(true) => exit::PASS,
        Ok(false) => {
            eprintln!("hilmod: at least one check failed");
            exit::VIOLATED
        }
        Err(e) => {
            eprintln!("hilmod: {e}");
            e.exit_code()
        }
    }
}
