use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qbnsl_cli::output::{output_dir, MANIFEST_FILE, RESULTS_FILE};
use qbnsl_cli::{replay, run_experiment, write_outputs, CliError, ExperimentConfig, Manifest, RunOptions, Task};

#[derive(Parser)]
#[command(name = "qbnsl", version, about = "Bayesian network structure learning with simulated QAOA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local score table and exhaustive optimum.
    Score(RunArgs),
    /// One QAOA configuration, with restarts.
    Learn(RunArgs),
    /// Forward-sample a dataset from a network.
    Sample(RunArgs),
    /// Grid over layer counts and CVaR alpha.
    SweepPa(RunArgs),
    /// Grid over noise channels and strengths.
    SweepNoise(RunArgs),
    /// Baselines and QAOA side by side, with SHD.
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Master seed, replacing the config's.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow registers above the default qubit ceiling.
    #[arg(long)]
    override_qubit_ceiling: bool,
    /// Rerun and compare against a recorded results table instead of writing.
    #[arg(long)]
    replay: Option<PathBuf>,
}

fn run(task: Task, args: RunArgs) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let opts = RunOptions {
        override_qubit_ceiling: args.override_qubit_ceiling,
    };
    if let Some(recorded) = &args.replay {
        replay(&cfg, task, &opts, recorded)?;
        println!("replay of {} matches", recorded.display());
        return Ok(());
    }
    let start = Instant::now();
    let out = run_experiment(&cfg, task, &opts)?;
    let manifest = Manifest::new(&cfg, &out, &opts, start.elapsed().as_secs_f64());
    let dir = output_dir(&cfg, task, args.out.as_deref());
    write_outputs(&dir, &out, &manifest)?;
    println!(
        "{} rows -> {} ({} and {})",
        out.table.rows.len(),
        dir.display(),
        RESULTS_FILE,
        MANIFEST_FILE
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, args) = match cli.command {
        Command::Score(a) => (Task::Score, a),
        Command::Learn(a) => (Task::Learn, a),
        Command::Sample(a) => (Task::Sample, a),
        Command::SweepPa(a) => (Task::SweepPa, a),
        Command::SweepNoise(a) => (Task::SweepNoise, a),
        Command::Compare(a) => (Task::Compare, a),
    };
    match run(task, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
