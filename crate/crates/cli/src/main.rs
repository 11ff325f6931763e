use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stablewalk::harness::{run_command, Command, RunOptions};
use stablewalk::par::Execution;

#[derive(Parser)]
#[command(name = "stablewalk", version, about = "Heavy-tailed walks, occupation functionals and lamplighter returns")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// JSON configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed, overriding the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 uses every core)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Run every loop on the calling thread
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Simulate paths and summarize their occupation records
    Simulate,
    /// Laplace functional of occupation times along a schedule of n
    Laplace,
    /// Return probabilities on a wreath product
    WreathReturn,
    /// Local limit theorem error along a schedule of n
    LltCheck,
    /// Principal Dirichlet eigenvalues
    Eigen,
    /// Closed-form constants
    Constants,
    /// Scaling sequence a_n and its regular variation
    Scaling,
    /// Fit the exponent of a CSV series
    Fit,
    /// Run the acceptance suite
    Accept,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => Command::Simulate,
            Cmd::Laplace => Command::Laplace,
            Cmd::WreathReturn => Command::WreathReturn,
            Cmd::LltCheck => Command::LltCheck,
            Cmd::Eigen => Command::Eigen,
            Cmd::Constants => Command::Constants,
            Cmd::Scaling => Command::Scaling,
            Cmd::Fit => Command::Fit,
            Cmd::Accept => Command::Accept,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match &cli.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let opts = RunOptions {
        seed: cli.seed,
        workers: cli.workers,
        out_dir: cli.out.clone(),
        exec: if cli.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    match run_command(cli.command.into(), text.as_deref(), &opts) {
        Ok(out) => {
            for l in &out.lines {
                println!("{l}");
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            if !out.unexpected_failures.is_empty() {
                eprintln!("failed criteria: {:?}", out.unexpected_failures);
                return ExitCode::from(1);
            }
            if out.skipped_only {
                eprintln!("every row was skipped by an oracle cap");
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
