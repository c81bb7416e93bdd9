//! Thin command-line front end; all real work lives in the library's `cli`
//! module.

use clap::{Parser, Subcommand};
use seqsearch::cli::{self, CliError, EvalMetric};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "seqsearch", about = "Sequence-discovery workbench", version)]
struct Args {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a training manifest (bundled preset name or JSON path).
    Train {
        #[arg(long)]
        config: String,
        /// Output directory; the run writes into <out>/<name>/.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        /// Override the manifest's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Continue from the last checkpoint in the run directory.
        #[arg(long)]
        resume: bool,
    },
    /// Evaluate a sequence file under a metric (ccc | mmf | mf).
    Eval {
        file: PathBuf,
        #[arg(long)]
        metric: EvalMetric,
        /// User count for the ccc metric (rows are split evenly).
        #[arg(long)]
        users: Option<usize>,
        /// Reward window "ml,mu" to also report the mapped reward.
        #[arg(long, value_parser = parse_bounds)]
        reward: Option<(f64, f64)>,
    },
    /// Run a baseline manifest (random | exhaustive | dqn).
    Baseline {
        #[arg(long)]
        config: String,
        #[arg(long, default_value = "runs/baseline")]
        out: PathBuf,
    },
    /// Monte-Carlo estimation sweep over clutter variances.
    RadarSim {
        /// Code files (or bundled names: legendre-59, discovered-59, ...).
        files: Vec<PathBuf>,
        /// Clutter variances, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1.0")]
        sigma2: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "runs/radar-sim")]
        out: PathBuf,
    },
    /// Print the header of a network checkpoint.
    InspectCheckpoint { path: PathBuf },
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"ml,mu\"".into());
    }
    let ml: f64 = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let mu: f64 = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((ml, mu))
}

fn run(args: Args) -> Result<(), CliError> {
    if args.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.workers)
            .build_global()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    }
    match args.command {
        Command::Train {
            config,
            out,
            seed,
            resume,
        } => {
            let mut hook = |r: &seqsearch::trainer::RunRecord| {
                println!(
                    "cycle {:>4}  episode {:>6}  mean {:>12.4}  extreme {:>12.4}  visited {:>9}  segment {}",
                    r.cycle, r.episode, r.mean_metric, r.extreme_metric, r.visited_states, r.segment_index
                );
            };
            let dir = cli::cmd_train(&config, &out, seed, resume, Some(&mut hook))?;
            println!("run complete: {}", dir.display());
        }
        Command::Eval {
            file,
            metric,
            users,
            reward,
        } => {
            print!("{}", cli::cmd_eval(&file, metric, users, reward)?);
        }
        Command::Baseline { config, out } => {
            print!("{}", cli::cmd_baseline(&config, &out)?);
        }
        Command::RadarSim {
            files,
            sigma2,
            trials,
            seed,
            out,
        } => {
            print!(
                "{}",
                cli::cmd_radar_sim(&files, &sigma2, trials, seed, &out)?
            );
            println!("csv written to {}", out.join("mse.csv").display());
        }
        Command::InspectCheckpoint { path } => {
            print!("{}", cli::cmd_inspect_checkpoint(&path)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(err) => {
            // clap prints its own help/usage text; usage problems exit 1.
            let _ = err.print();
            if err.use_stderr() {
                return ExitCode::from(1);
            }
            return ExitCode::SUCCESS;
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
