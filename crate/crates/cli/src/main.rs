//! `la3d` — anonymize directories of video frames.

mod commands;
mod config;
mod error;
mod font;
mod frames;
mod grid;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{FailurePolicyName, RunConfig};
use error::{CliError, EXIT_CODE_HELP};

#[derive(Parser)]
#[command(
    name = "la3d",
    version,
    about = "Low-latency adaptive anonymization for video frame directories",
    after_help = EXIT_CODE_HELP,
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the config-file fields; a set flag wins over the file.
#[derive(Args, Default)]
struct RunFlags {
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input frame directory (lexicographic name order = temporal order)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sidecar mask directory
    #[arg(long)]
    masks: Option<PathBuf>,
    /// External mask provider command line (whitespace-split)
    #[arg(long)]
    provider_cmd: Option<String>,
    /// Output directory
    #[arg(long)]
    output: Option<PathBuf>,
    /// Anonymization preset name
    #[arg(long)]
    preset: Option<String>,
    /// Adaptive strength gain
    #[arg(long)]
    alpha_r: Option<f64>,
    /// Kernel/downsize growth cap as a fraction of the box dimension
    #[arg(long)]
    alpha_b: Option<f64>,
    /// Maximum-strength anonymization (true/false)
    #[arg(long)]
    ismax: Option<bool>,
    /// Scale sigma with the scaling factor as well (true/false)
    #[arg(long)]
    isfullblur: Option<bool>,
    /// Reference resolution WxH for resolution-aligned strength
    #[arg(long)]
    z_ref: Option<String>,
    /// Detector confidence threshold in [0, 1]
    #[arg(long)]
    lambda: Option<f64>,
    /// Also anonymize carried personal items (true/false)
    #[arg(long)]
    include_items: Option<bool>,
    /// What to do when the detector fails for a frame
    #[arg(long, value_parser = clap::value_parser!(FailurePolicyName))]
    on_detector_failure: Option<FailurePolicyName>,
    /// Worker threads for the transform stage
    #[arg(long)]
    workers: Option<usize>,
    /// Benchmark repetitions (excluding the warm-up pass)
    #[arg(long)]
    repeats: Option<usize>,
    /// Directory for summary/bench reports (defaults to the output dir)
    #[arg(long)]
    report_dir: Option<PathBuf>,
}

impl RunFlags {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let from_flags = RunConfig {
            input: self.input,
            masks: self.masks,
            provider_cmd: self.provider_cmd,
            output: self.output,
            preset: self.preset,
            alpha_r: self.alpha_r,
            alpha_b: self.alpha_b,
            ismax: self.ismax,
            isfullblur: self.isfullblur,
            z_ref: self.z_ref,
            lambda: self.lambda,
            include_items: self.include_items,
            on_detector_failure: self.on_detector_failure,
            workers: self.workers,
            repeats: self.repeats,
            report_dir: self.report_dir,
        };
        Ok(match &self.config {
            Some(path) => RunConfig::from_file(path)?.merged_with(from_flags),
            None => from_flags,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Anonymize a frame directory and write reports
    Anonymize {
        #[command(flatten)]
        flags: RunFlags,
        /// Also compute within-mask proxy metrics per frame
        #[arg(long)]
        metrics: bool,
    },
    /// Benchmark presets over a corpus; writes bench.csv
    Bench {
        #[command(flatten)]
        flags: RunFlags,
        /// Comma-separated preset names
        #[arg(long, value_delimiter = ',', required = true)]
        presets: Vec<String>,
    },
    /// Emit one labeled side-by-side comparison grid per frame
    Compare {
        #[command(flatten)]
        flags: RunFlags,
        /// Comma-separated preset names (at least two)
        #[arg(long, value_delimiter = ',', required = true)]
        presets: Vec<String>,
    },
    /// Validate every sidecar in a directory against the format contract
    ValidateMasks {
        /// Sidecar mask directory
        #[arg(long)]
        masks: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Anonymize { flags, metrics } => {
            let cfg = flags.into_config()?;
            commands::cmd_anonymize(&cfg, metrics)
        }
        Command::Bench { flags, presets } => {
            let cfg = flags.into_config()?;
            let repeats = cfg.repeats.unwrap_or(3);
            commands::cmd_bench(&cfg, &presets, repeats)
        }
        Command::Compare { flags, presets } => {
            let cfg = flags.into_config()?;
            commands::cmd_compare(&cfg, &presets)
        }
        Command::ValidateMasks { masks } => commands::cmd_validate_masks(&masks),
    }
}

fn main() {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("LA3D_LOG_LEVEL", "warn"),
    )
    .init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // machine-readable error report on the diagnostics stream
        eprintln!(
            "{}",
            serde_json::json!({ "error": { "code": e.code as i32, "message": e.message } })
        );
        std::process::exit(e.code as i32);
    }
}
