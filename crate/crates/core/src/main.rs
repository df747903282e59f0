//! Command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mgal::cli::{cmd_export, cmd_sweep, cmd_synth, cmd_train, CliConfig};

#[derive(Parser)]
#[command(
    name = "mgal",
    version,
    about = "Adversarial multi-graph representation learning and semi-supervised node classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config-file value.
#[derive(Args)]
struct CommonArgs {
    /// Key-value config file applied before any flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed; run r uses seed + r
    #[arg(long)]
    seed: Option<u64>,
    /// Method: gcn_single, gcn_m, multi_gcn, mgl or mgal
    #[arg(long)]
    method: Option<String>,
    /// View index for gcn_single
    #[arg(long)]
    view: Option<usize>,
    /// Labeled fraction per class
    #[arg(long)]
    ratio: Option<f64>,
    /// Number of runs with reseeded splits
    #[arg(long)]
    runs: Option<usize>,
    /// Weight of the adversarial term in the generator objective
    #[arg(long)]
    lambda: Option<f64>,
    /// Prediction head: fc or gconv
    #[arg(long)]
    head: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Synthetic dataset preset (default, small)
    #[arg(long)]
    synthetic: Option<String>,
    /// Dataset manifest path
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment: writes metrics, curves and checkpoints
    Train(CommonArgs),
    /// Accuracy across view-subset sizes
    Sweep(CommonArgs),
    /// Export learned embeddings from a checkpoint
    Export {
        #[command(flatten)]
        common: CommonArgs,
        /// Checkpoint written by `train`
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Sample a synthetic dataset and write it with its manifest
    Synth(CommonArgs),
}

fn resolve(common: &CommonArgs) -> mgal::Result<CliConfig> {
    let mut cfg = CliConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = &common.method {
        cfg.method = v.clone();
    }
    if let Some(v) = common.view {
        cfg.view = v;
    }
    if let Some(v) = common.ratio {
        cfg.ratio = v;
    }
    if let Some(v) = common.runs {
        cfg.runs = v;
    }
    if let Some(v) = common.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = &common.head {
        cfg.head = v.clone();
    }
    if let Some(v) = &common.out {
        cfg.out = v.clone();
    }
    if let Some(v) = &common.synthetic {
        cfg.synthetic = Some(v.clone());
    }
    if let Some(v) = &common.manifest {
        cfg.manifest = Some(v.clone());
    }
    Ok(cfg)
}

fn run(cli: Cli) -> mgal::Result<()> {
    match &cli.command {
        Command::Train(common) => cmd_train(&resolve(common)?),
        Command::Sweep(common) => cmd_sweep(&resolve(common)?),
        Command::Export { common, checkpoint } => cmd_export(&resolve(common)?, checkpoint),
        Command::Synth(common) => cmd_synth(&resolve(common)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
