//! `cadence`: ingest sensor datasets, train the contrastive encoder, embed
//! windows, probe label efficiency, and segment salient activity.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors. Every
//! subcommand is deterministic given its inputs, config, and `--seed`; run
//! manifests are the only outputs that carry timing.

mod manifest;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cadence", version, about, max_term_width = 100)]
struct Cli {
    /// Seed for all randomness; overrides any config-file seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker-thread cap (env CADENCE_THREADS is the fallback; default: all
    /// cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a public dataset layout into the canonical format.
    Ingest {
        /// Source layout: pamap2, mhealth, hmpadl, dailysports, or canonical.
        #[arg(long)]
        dataset: String,
        /// Dataset root directory.
        #[arg(long)]
        input: PathBuf,
        /// Canonical output directory.
        #[arg(long)]
        out: PathBuf,
    },

    /// Train the encoder self-supervised on a canonical dataset.
    Train {
        /// Canonical dataset directory.
        #[arg(long)]
        data: PathBuf,
        /// Output directory for checkpoint.bin and loss.csv.
        #[arg(long)]
        out: PathBuf,
        /// key=value config file; defaults apply to missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Total step horizon, overriding the config.
        #[arg(long)]
        steps: Option<u64>,
        /// Checkpoint to resume from.
        #[arg(long)]
        resume: Option<PathBuf>,
    },

    /// Embed every window of a canonical dataset.
    Embed {
        /// Canonical dataset directory.
        #[arg(long)]
        data: PathBuf,
        /// Trained checkpoint (omit with --baseline).
        #[arg(long, conflicts_with = "baseline")]
        checkpoint: Option<PathBuf>,
        /// Write the 8-d per-window moment features instead of encoder
        /// embeddings.
        #[arg(long)]
        baseline: bool,
        /// Output embeddings file (a .meta.csv sidecar is written next to
        /// it).
        #[arg(long)]
        out: PathBuf,
    },

    /// Fit label-efficiency probes over an embeddings file.
    Probe {
        /// Embeddings file from `embed`.
        #[arg(long)]
        embeddings: PathBuf,
        /// key=value config file (probe.* keys).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Feature source tag: embedding or baseline; overrides the config.
        #[arg(long)]
        source: Option<String>,
        /// Output report CSV (source,n,repeat,accuracy).
        #[arg(long)]
        out: PathBuf,
    },

    /// Propose and score salient segments from an embeddings file.
    Segment {
        /// Embeddings file from `embed`.
        #[arg(long)]
        embeddings: PathBuf,
        /// Output segments CSV (subject_id,start_ms,end_ms,salience).
        #[arg(long)]
        out: PathBuf,
    },

    /// Score predicted segments against labeled activity intervals.
    EvalSeg {
        /// Segments CSV from `segment`.
        #[arg(long)]
        segments: PathBuf,
        /// Truth labels: a canonical dataset directory, or a combined CSV
        /// with header subject_id,activity,start_ms,end_ms.
        #[arg(long)]
        labels: PathBuf,
        /// Output report CSV (activity, event P/R, window P/R).
        #[arg(long)]
        out: PathBuf,
    },

    /// Apply random augmentation chains to sample windows and write
    /// before/after CSVs for inspection.
    AugmentPreview {
        /// Canonical dataset directory.
        #[arg(long)]
        data: PathBuf,
        /// Output directory for preview_*.csv and chains.csv.
        #[arg(long)]
        out: PathBuf,
        /// Number of windows to preview, spread evenly across the dataset.
        #[arg(long, default_value_t = 8)]
        count: usize,
        /// key=value config file; only the augment.* keys are used.
        #[arg(long)]
        config: Option<PathBuf>,
    },

    /// Generate the synthetic quasi-periodic activity corpus.
    Synth {
        #[arg(long, default_value_t = 3)]
        classes: usize,
        #[arg(long, default_value_t = 20)]
        subjects: usize,
        /// Activity blocks per subject.
        #[arg(long, default_value_t = 8)]
        blocks: usize,
        /// Block duration bounds in whole seconds.
        #[arg(long, default_value_t = 90)]
        block_min_s: u32,
        #[arg(long, default_value_t = 150)]
        block_max_s: u32,
        /// Sensor-noise standard deviation in g.
        #[arg(long, default_value_t = 0.02)]
        noise_g: f64,
        /// Canonical output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>, String> {
    if let Some(n) = flag {
        if n == 0 {
            return Err("--threads must be ≥ 1".into());
        }
        return Ok(Some(n));
    }
    match std::env::var("CADENCE_THREADS") {
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("CADENCE_THREADS={raw:?} is not a positive integer")),
        },
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here as successful terminations.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match resolve_threads(cli.threads) {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("error: thread pool: {e}");
                return ExitCode::from(2);
            }
        }
        Ok(None) => {}
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(1);
        }
    }

    match run::dispatch(cli.command, cli.seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
