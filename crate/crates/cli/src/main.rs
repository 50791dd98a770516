use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hetsim::config::B3Choice;
use hetsim::{load_config, run_sweep, write_config, write_csv, ConfigError, ExperimentConfig, SweepError, SweepVariable};

/// Delivery-delay sweeps for cache-enabled two-tier networks.
#[derive(Debug, Parser)]
#[command(name = "hetsim", version)]
struct Args {
    /// TOML experiment file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Variable to sweep (lambda_mc, lambda_sc, target_sir, storage_S) or `all`.
    #[arg(long)]
    sweep: Option<String>,

    /// Replications per (value, scenario) point.
    #[arg(long)]
    reps: Option<usize>,

    #[arg(long)]
    seed: Option<u64>,

    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Only evaluate closed forms.
    #[arg(long)]
    theory_only: bool,

    /// Hit-probability form for the uniform segment: printed or integral.
    #[arg(long)]
    b3_variant: Option<B3Choice>,

    /// Write the default configuration to this path and exit.
    #[arg(long)]
    write_default_config: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), SweepError> {
    if let Some(path) = &args.write_default_config {
        write_config(path, &ExperimentConfig::default())?;
        return Ok(());
    }

    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(reps) = args.reps {
        config.experiment.replications = reps;
    }
    if let Some(seed) = args.seed {
        config.experiment.master_seed = seed;
    }
    if let Some(variant) = args.b3_variant {
        config.cache.b3_variant = variant;
    }
    let variables = match args.sweep.as_deref() {
        None => vec![config.experiment.sweep],
        Some("all") => SweepVariable::ALL.to_vec(),
        Some(name) => vec![name.parse().map_err(ConfigError::Invalid)?],
    };

    let mut rows = Vec::new();
    for variable in variables {
        rows.extend(run_sweep(&config, variable, args.theory_only)?);
    }

    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| SweepError::Output(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    write_csv(out, &rows)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    if let Ok(threads) = std::env::var("HETSIM_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("hetsim: cannot size thread pool: {e}");
                }
            }
            _ => {
                eprintln!("hetsim: HETSIM_THREADS must be a positive integer, got `{threads}`");
                return ExitCode::from(2);
            }
        }
    }

    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hetsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
