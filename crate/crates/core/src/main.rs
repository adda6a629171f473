use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dcsbm::cli::{self, Failure, RefitOptions, EXIT_USAGE, OUTPUT_DIR_ENV};
use dcsbm::config::RunConfig;
use dcsbm::Error;

#[derive(Parser)]
#[command(name = "dcsbm", version, about = "Fit nonparametric degree-corrected blockmodels by Gibbs sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sampler and write chains plus summaries.
    Fit {
        /// Run config (`key = value` lines).
        config: PathBuf,
        /// Output directory; defaults to the config's `output_dir`, then
        /// $DCSBM_OUTPUT_DIR, then `./run`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Override a config key, e.g. `--set seed=7`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Maximum chains run at once.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recompute summaries, similarity matrices and Binder partitions.
    Summarize { run_dir: PathBuf },
    /// Rerun with partitions fixed to estimate cluster values.
    Refit {
        run_dir: PathBuf,
        /// Community partition CSV (default: the run's Binder partition).
        #[arg(long)]
        community: Option<PathBuf>,
        /// Popularity partition CSV (default: the run's Binder partition).
        #[arg(long)]
        popularity: Option<PathBuf>,
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long)]
        burn_in: Option<usize>,
        #[arg(long)]
        thin: Option<usize>,
        #[arg(long)]
        chains: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a synthetic network from a parameter file.
    Simulate {
        params: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Load edge lists and print basic counts.
    ValidateData {
        files: Vec<PathBuf>,
        /// Read data paths and index base from a run config instead.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn default_output(explicit: Option<PathBuf>, from_config: Option<PathBuf>, fallback: &str) -> PathBuf {
    explicit
        .or(from_config)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(fallback))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut out = std::io::stdout();
    let bad = |error: Error| Failure { code: EXIT_USAGE, error };
    match cli.command {
        Command::Fit {
            config,
            output,
            overrides,
            jobs,
            seed,
        } => {
            let mut cfg = RunConfig::load(&config).map_err(bad)?;
            for kv in &overrides {
                cfg.apply_override(kv).map_err(bad)?;
            }
            if jobs.is_some() {
                cfg.chains.jobs = jobs;
            }
            if let Some(s) = seed {
                cfg.chains.seed = s;
            }
            let dir = default_output(output, cfg.output_dir.clone(), "run");
            cli::cmd_fit(&cfg, &dir, &mut out)?;
            println!("wrote {}", dir.display());
        }
        Command::Summarize { run_dir } => {
            cli::cmd_summarize(&run_dir, &mut out)?;
        }
        Command::Refit {
            run_dir,
            community,
            popularity,
            iterations,
            burn_in,
            thin,
            chains,
            seed,
        } => {
            let opts = RefitOptions {
                community,
                popularity,
                iterations,
                burn_in,
                thin,
                chains,
                seed,
            };
            cli::cmd_refit(&run_dir, &opts, &mut out)?;
        }
        Command::Simulate { params, output } => {
            let dir = default_output(output, None, "simulated");
            for p in cli::cmd_simulate(&params, &dir, &mut out)? {
                println!("wrote {}", p.display());
            }
        }
        Command::ValidateData { files, config } => {
            let cfg = match config {
                Some(p) => RunConfig::load(&p).map_err(bad)?,
                None => RunConfig::default(),
            };
            cli::cmd_validate_data(&files, &cfg, &mut out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
