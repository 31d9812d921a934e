//! Reporting subcommands: stats and reconstruct-interpreter.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};
use smf_data::{
    dataset_stats, load_manifest, reconstruct_confusion, MetricTriple,
    DEFAULT_RECONSTRUCTION_TOL,
};

use crate::envelope::{write_sidecar, write_text_file, CliError, TOOL_NAME, TOOL_VERSION};

// --------------------------------------------------------------- stats --

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    /// JSON-lines video manifest
    #[arg(long)]
    pub manifest: PathBuf,
    /// Optional text-table output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_stats(args: &StatsArgs, params: &Value) -> Result<Value, CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let report = dataset_stats(&manifest)?;
    if let Some(out) = &args.out {
        let text = format!("# {TOOL_NAME} {TOOL_VERSION}\n{}", report.to_text());
        write_text_file(out, &text)?;
        write_sidecar(out, "stats", params)?;
    }
    let mut result = serde_json::to_value(&report).expect("report serializes");
    result["mean_duration_rounded"] = json!(report.mean_duration_rounded());
    result["table"] = json!(report.to_text());
    Ok(result)
}

// ----------------------------------------------- reconstruct-interpreter --

#[derive(Debug, Args, Serialize)]
pub struct ReconstructInterpreterArgs {
    /// Real (negative-class) video count
    #[arg(long)]
    pub real: u64,
    /// Fake (positive-class) video count
    #[arg(long)]
    pub fake: u64,
    /// Reported sensitivity (fake recall), e.g. 0.8030
    #[arg(long)]
    pub sens: f64,
    /// Reported specificity (real recall), e.g. 0.9091
    #[arg(long)]
    pub spec: f64,
    /// Reported accuracy, e.g. 0.8384
    #[arg(long)]
    pub acc: f64,
    /// Absolute tolerance when matching the rounded metrics
    #[arg(long, default_value_t = DEFAULT_RECONSTRUCTION_TOL)]
    pub tol: f64,
    /// Optional JSON output path for the reconstruction
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run_reconstruct(
    args: &ReconstructInterpreterArgs,
    params: &Value,
) -> Result<Value, CliError> {
    let target = MetricTriple {
        sensitivity: args.sens,
        specificity: args.spec,
        accuracy: args.acc,
    };
    let confusion = reconstruct_confusion(args.real, args.fake, &target, args.tol)?;
    let metrics = confusion.metrics()?;
    let result = json!({
        "confusion": confusion,
        "metrics": metrics,
        "n_real": args.real,
        "n_fake": args.fake,
    });
    if let Some(out) = &args.out {
        let text = serde_json::to_string_pretty(&result).expect("result serializes") + "\n";
        write_text_file(out, &text)?;
        write_sidecar(out, "reconstruct-interpreter", params)?;
    }
    Ok(result)
}
