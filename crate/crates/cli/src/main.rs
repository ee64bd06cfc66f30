//! `vidtok`: batch CLI over the execution-video toolkit.
//!
//! Exit codes: 0 success, 1 input or config error, 2 processing error,
//! 3 external-service error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vidtok_core::pruner::Variant;

mod commands;
mod config;

use config::RunConfig;

/// CLI failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    pub fn processing(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn service(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    /// Maps a core error raised while reading or validating inputs.
    pub fn from_input(err: vidtok_core::Error) -> Self {
        match err {
            vidtok_core::Error::Transport(_) => Self::service(err.to_string()),
            _ => Self::input(err.to_string()),
        }
    }

    /// Maps a core error raised mid-pipeline.
    pub fn from_processing(err: vidtok_core::Error) -> Self {
        match err {
            vidtok_core::Error::Transport(_) => Self::service(err.to_string()),
            _ => Self::processing(err.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "vidtok",
    version,
    about = "Prepare, prune, and score GUI execution videos"
)]
struct Cli {
    /// Key=value config file; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Stp,
    Ttp,
    Both,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Stp => Variant::StpOnly,
            VariantArg::Ttp => Variant::TtpOnly,
            VariantArg::Both => Variant::Both,
        }
    }
}

/// Flags shared by the pruning-flavored commands. Unset flags fall back to
/// the config file, then to defaults.
#[derive(Args, Debug, Default)]
struct TuningArgs {
    /// Spatial edge threshold.
    #[arg(long)]
    tau_s: Option<f64>,

    /// Temporal similarity threshold.
    #[arg(long)]
    tau_t: Option<f64>,

    /// Component-size threshold for spatial pruning.
    #[arg(long)]
    tau_large: Option<usize>,

    /// Patch edge length in pixels for feature extraction.
    #[arg(long)]
    patch_size: Option<usize>,

    /// Frame budget for uniform sampling.
    #[arg(long)]
    max_frames: Option<usize>,

    /// Pruning passes to run.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,

    /// Fold adjacent frame pairs before temporal pruning and packing.
    #[arg(long)]
    merge_adjacent: bool,

    /// Worker threads for batch items; 0 picks the machine default.
    #[arg(long)]
    workers: Option<usize>,

    /// Seed for synthetic generation and the mock service.
    #[arg(long)]
    seed: Option<u64>,
}

impl TuningArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.tau_s {
            cfg.tau_s = v;
        }
        if let Some(v) = self.tau_t {
            cfg.tau_t = v;
        }
        if let Some(v) = self.tau_large {
            cfg.tau_large = v;
        }
        if let Some(v) = self.patch_size {
            cfg.patch_size = v;
        }
        if let Some(v) = self.max_frames {
            cfg.max_frames = v;
        }
        if let Some(v) = self.variant {
            cfg.variant = v.into();
        }
        if self.merge_adjacent {
            cfg.merge_adjacent = true;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate a trajectory manifest and write the normalized store.
    Ingest {
        /// Trajectory manifest (JSON array of records).
        manifest: PathBuf,

        /// Output path for the validated store.
        #[arg(long)]
        out: PathBuf,
    },

    /// Prune token grids or trajectory keyframes and pack the survivors.
    Prune {
        /// A grid file, a directory of grid files, or a trajectory manifest.
        input: PathBuf,

        /// Output directory for packed sequences and reports.
        #[arg(long)]
        out: PathBuf,

        #[command(flatten)]
        tuning: TuningArgs,

        /// Also write per-frame keep-mask images (white = keep).
        #[arg(long)]
        viz_masks: bool,

        /// Resize keyframes to 1280x720 before extraction.
        #[arg(long)]
        resize_720p: bool,
    },

    /// Score a predictions file and write the metrics report.
    Eval {
        /// JSON-lines prediction records.
        predictions: PathBuf,

        /// Output path for the report JSON.
        #[arg(long)]
        out: PathBuf,
    },

    /// Benchmark pruning variants on the synthetic static-background suite.
    Bench {
        /// Frame counts to benchmark, comma separated.
        #[arg(long, value_delimiter = ',')]
        frames: Vec<usize>,

        /// Output directory for bench.json and bench.csv.
        #[arg(long)]
        out: PathBuf,

        /// Grid height of the synthetic scene.
        #[arg(long, default_value_t = 12)]
        grid_height: usize,

        /// Grid width of the synthetic scene.
        #[arg(long, default_value_t = 16)]
        grid_width: usize,

        #[command(flatten)]
        tuning: TuningArgs,
    },

    /// Materialize a scene description into a grid file.
    Synth {
        /// Scene description JSON.
        scene: PathBuf,

        /// Output path for the binary grid.
        #[arg(long)]
        out: PathBuf,

        /// Also render frames and a trajectory manifest into this directory.
        #[arg(long)]
        render: Option<PathBuf>,

        #[command(flatten)]
        tuning: TuningArgs,
    },

    /// Translate positive trajectories into verified hard negatives.
    SynthNeg {
        /// Trajectory store holding positive records.
        records: PathBuf,

        /// Translation service: `mock:<seed>` or an http endpoint.
        #[arg(long)]
        service: Option<String>,

        /// Output path for the emitted negatives manifest.
        #[arg(long)]
        out: PathBuf,

        /// Verification queue (append-only JSON lines).
        #[arg(long)]
        queue: Option<PathBuf>,

        /// Prompt template id sent with each request.
        #[arg(long)]
        template: Option<String>,

        /// Approve every newly queued entry (for mock/offline runs).
        #[arg(long)]
        approve_all: bool,

        #[command(flatten)]
        tuning: TuningArgs,
    },
}

fn build_config(cli_config: &Option<PathBuf>, tuning: Option<&TuningArgs>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = cli_config {
        cfg.load_file(path)?;
    }
    cfg.apply_env();
    if let Some(tuning) = tuning {
        tuning.apply(&mut cfg);
    }
    cfg.validated()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Ingest { manifest, out } => {
            build_config(&cli.config, None)?;
            commands::ingest::run(manifest, out)
        }
        Command::Prune {
            input,
            out,
            tuning,
            viz_masks,
            resize_720p,
        } => {
            let cfg = build_config(&cli.config, Some(tuning))?;
            commands::prune::run(input, out, &cfg, *viz_masks, *resize_720p)
        }
        Command::Eval { predictions, out } => {
            build_config(&cli.config, None)?;
            commands::eval::run(predictions, out)
        }
        Command::Bench {
            frames,
            out,
            grid_height,
            grid_width,
            tuning,
        } => {
            let cfg = build_config(&cli.config, Some(tuning))?;
            commands::bench::run(frames, out, *grid_height, *grid_width, &cfg)
        }
        Command::Synth {
            scene,
            out,
            render,
            tuning,
        } => {
            let cfg = build_config(&cli.config, Some(tuning))?;
            commands::synth::run(scene, out, render.as_deref(), &cfg)
        }
        Command::SynthNeg {
            records,
            service,
            out,
            queue,
            template,
            approve_all,
            tuning,
        } => {
            let mut cfg = build_config(&cli.config, Some(tuning))?;
            if let Some(template) = template {
                cfg.template = template.clone();
            }
            commands::synth_neg::run(records, service.as_deref(), out, queue.as_deref(), *approve_all, &cfg)
        }
    }
}

fn main() -> ExitCode {
    // Argument mistakes are input errors (exit 1); help and version are not.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
