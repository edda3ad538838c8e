use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use macflow_cli::app::{self, AppError, Outcome};

#[derive(Parser)]
#[command(name = "macflow", version, about = "Variable-density MAC flow solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
        /// Accepted for symmetry; a single run is sequential.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Refinement study with observed orders.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        /// Number of levels, doubling from the first configured one.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
        /// Levels run concurrently.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Identity and inequality suites on random fields.
    Verify {
        /// Take the mesh from this config instead of the built-in pair.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<Outcome, AppError> = match cli.command {
        Command::Run { config, output_dir, .. } => app::run(&config, &output_dir),
        Command::Convergence {
            config,
            levels,
            output_dir,
            threads,
        } => app::convergence(&config, levels, &output_dir, threads),
        Command::Verify {
            config,
            trials,
            seed,
            output_dir,
            ..
        } => app::verify(config.as_deref(), trials, seed, &output_dir),
    };
    match result {
        Ok(o) => {
            print!("{}", o.report);
            ExitCode::from(app::EXIT_OK)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
