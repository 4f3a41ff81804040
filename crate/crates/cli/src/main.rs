use clap::Parser;
use modular_entropy::acceptance::DEFAULT_SEED;
use modular_entropy_cli::{execute, Command, JobSpec};
use std::path::PathBuf;

/// Modular entropy toolkit: profiles, modular data, Fock oracles and geometry sweeps.
#[derive(Debug, Parser)]
#[command(name = "modent", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// JSON job input.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Report path; stdout when absent. `.csv` selects CSV for entropy-profile.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    /// `start:stop:count` or comma-separated values.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
}

fn main() {
    let a = Args::parse();
    let spec = JobSpec {
        command: a.command,
        input: a.input,
        output: a.output,
        seed: a.seed,
        tol: a.tol,
        grid: a.grid,
        cutoff: a.cutoff,
        samples: a.samples,
    };
    std::process::exit(execute(&spec));
}
