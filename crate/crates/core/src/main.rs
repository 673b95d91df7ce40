use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twogate::experiment::{
    collect_documents, compare_report, run_experiment, write_outputs, write_report, CostSpec,
    ExperimentConfig,
};
use twogate::{Error, MinimizerSettings, OptimizerKind, PairingStrategy};

#[derive(Parser)]
#[command(name = "twogate", version, about = "Single- and two-gate quaternion optimizer benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated optimizations and write `<label>.csv` and `<label>.json`.
    Run(RunArgs),
    /// Compare two-gate results against their single-gate baselines.
    Compare {
        /// Result JSON files or directories containing them.
        #[arg(long, num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration; replaces the individual flags.
    #[arg(long, conflicts_with_all = ["cost", "layers", "optimizer", "strategy", "iterations", "runs", "seed", "shots"])]
    config: Option<PathBuf>,
    /// tfim:<n>[:<J>:<h>], fh[:<t>:<U>], file:<path> or fidelity:<n>.
    #[arg(long, required_unless_present = "config")]
    cost: Option<String>,
    #[arg(long, required_unless_present = "config")]
    layers: Option<usize>,
    /// fraxis, fqs, tgf or tgfqs.
    #[arg(long, required_unless_present = "config")]
    optimizer: Option<String>,
    /// linear, random, opposite or half_shifted (two-gate only; default random).
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long, default_value_t = 50)]
    iterations: usize,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shots per Pauli term; exact expectation values when omitted.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

fn config_from_args(a: &RunArgs) -> twogate::Result<ExperimentConfig> {
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
        return serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())));
    }
    let optimizer: OptimizerKind = a.optimizer.as_deref().unwrap_or_default().parse()?;
    let strategy = match &a.strategy {
        Some(s) => Some(s.parse::<PairingStrategy>()?),
        None => optimizer.is_two_gate().then_some(PairingStrategy::Random),
    };
    Ok(ExperimentConfig {
        cost: a.cost.as_deref().unwrap_or_default().parse::<CostSpec>()?,
        layers: a.layers.unwrap_or_default(),
        optimizer,
        strategy,
        iterations: a.iterations,
        runs: a.runs,
        seed: a.seed,
        shots: a.shots,
        minimizer: MinimizerSettings::default(),
    })
}

fn run(cli: Cli) -> twogate::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let cfg = config_from_args(&args)?;
            let result = run_experiment(&cfg)?;
            let (csv, json) = write_outputs(&result, &args.out)?;
            println!(
                "{}: mean final {} {:.3e} ± {:.1e} over {} runs",
                cfg.label(),
                result.summary.metric,
                result.summary.mean_final_relative_error,
                result.summary.stderr_final_relative_error,
                cfg.runs
            );
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Command::Compare { inputs, out } => {
            let report = compare_report(&collect_documents(&inputs)?)?;
            for row in &report.rows {
                println!(
                    "{} vs {}: baseline {:.3e}, best {} {:+.1}%",
                    row.optimizer,
                    row.baseline,
                    row.baseline_value,
                    row.best_strategy.map_or("-".to_string(), |s| s.to_string()),
                    row.best_improvement_percent
                );
            }
            write_report(&report, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
