//! `smf` — command-line surface of the sign-motion-forensics toolkit.
//!
//! Every subcommand is deterministic: identical inputs (and `--seed`
//! where randomness exists) give byte-identical outputs. Each run prints
//! a JSON envelope to stdout carrying the tool version, the full
//! parameter echo, and a result summary; file payloads get a sidecar
//! `*.meta.json` with the same provenance. Validation failures print a
//! machine-readable JSON error to stderr and exit 1; usage errors exit 2.

mod cmd_detect;
mod cmd_frames;
mod cmd_stats;
mod cmd_text;
mod envelope;
mod maps;

use clap::{Parser, Subcommand};

use crate::envelope::{print_envelope, CliError};

#[derive(Parser)]
#[command(
    name = "smf",
    version,
    about = "Deterministic toolkit for motion-transfer forensics: frame ops, \
             flow composition, transcript similarity, detection baselines, \
             and dataset reporting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Face-anchored dynamic square crop of a frame directory
    Crop(cmd_frames::CropArgs),
    /// Sharpen / smooth / resample one image
    Enhance(cmd_frames::EnhanceArgs),
    /// Compose region motions and weight maps into a dense backward flow
    Flow(cmd_frames::FlowArgs),
    /// Backward-warp an image along a flow field
    Warp(cmd_frames::WarpArgs),
    /// Robust losses between two images, with a finite-difference
    /// gradient check
    LossCheck(cmd_frames::LossCheckArgs),
    /// Score one real/fake transcript pair on the full similarity suite
    CompareTranscripts(cmd_text::CompareTranscriptsArgs),
    /// Aggregate transcript similarity distributions into a CSV/JSON report
    ReportLinguistic(cmd_text::ReportLinguisticArgs),
    /// Generate one deterministic train/validation/test fold
    Split(cmd_detect::SplitArgs),
    /// Train a detection baseline on a fold's training videos
    DetectTrain(cmd_detect::DetectTrainArgs),
    /// Evaluate a saved model on one fold, or run the full 3-fold experiment
    DetectEval(cmd_detect::DetectEvalArgs),
    /// Dataset composition report from a manifest
    Stats(cmd_stats::StatsArgs),
    /// Recover the confusion matrix behind reported metrics
    ReconstructInterpreter(cmd_stats::ReconstructInterpreterArgs),
}

fn init_threads() {
    if let Ok(value) = std::env::var("SMF_THREADS") {
        if let Ok(n) = value.trim().parse::<usize>() {
            if n >= 1 {
                // Ignore failure: the pool may already be initialized.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Crop(args) => dispatch("crop", &args, cmd_frames::run_crop),
        Command::Enhance(args) => dispatch("enhance", &args, cmd_frames::run_enhance),
        Command::Flow(args) => dispatch("flow", &args, cmd_frames::run_flow),
        Command::Warp(args) => dispatch("warp", &args, cmd_frames::run_warp),
        Command::LossCheck(args) => dispatch("loss-check", &args, cmd_frames::run_loss_check),
        Command::CompareTranscripts(args) => {
            dispatch("compare-transcripts", &args, cmd_text::run_compare)
        }
        Command::ReportLinguistic(args) => {
            dispatch("report-linguistic", &args, cmd_text::run_report)
        }
        Command::Split(args) => dispatch("split", &args, cmd_detect::run_split),
        Command::DetectTrain(args) => {
            dispatch("detect-train", &args, cmd_detect::run_detect_train)
        }
        Command::DetectEval(args) => dispatch("detect-eval", &args, cmd_detect::run_detect_eval),
        Command::Stats(args) => dispatch("stats", &args, cmd_stats::run_stats),
        Command::ReconstructInterpreter(args) => {
            dispatch("reconstruct-interpreter", &args, cmd_stats::run_reconstruct)
        }
    }
}

/// Serializes the args once as the parameter echo, runs the command, and
/// prints the envelope.
fn dispatch<A: serde::Serialize>(
    command: &str,
    args: &A,
    f: impl FnOnce(&A, &serde_json::Value) -> Result<serde_json::Value, CliError>,
) -> Result<(), CliError> {
    let params = serde_json::to_value(args).expect("args serialize");
    let result = f(args, &params)?;
    print_envelope(command, &params, &result);
    Ok(())
}

fn main() {
    init_threads();
    // Unknown subcommands and malformed flags exit 2 with usage text.
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{}", err.to_json());
        std::process::exit(1);
    }
}
