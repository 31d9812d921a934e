//! Transcript subcommands: compare-transcripts and report-linguistic.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Serialize;
use serde_json::{json, Value};
use smf_data::{load_manifest, Label, Manifest};
use smf_text::{
    aggregate_with_bins, read_pairs_file, score_pair, score_pairs, tokenize, SimilarityRecord,
    TranscriptPair, DEFAULT_BINS,
};

use crate::envelope::{write_sidecar, write_text_file, CliError};

/// Builds one pair per fake record that carries a transcript and whose
/// driving real video also carries one. The pair id is the fake video id.
fn pairs_from_manifest(manifest: &Manifest) -> Result<Vec<TranscriptPair>, CliError> {
    let mut pairs = Vec::new();
    for record in &manifest.records {
        if record.label != Label::Fake {
            continue;
        }
        let (Some(fake_text), Some(driving_id)) =
            (&record.transcript, &record.driving_video_id)
        else {
            continue;
        };
        let driving = manifest.record(driving_id).ok_or_else(|| {
            CliError::invalid(format!(
                "{}: driving video {driving_id} missing from manifest",
                record.video_id
            ))
        })?;
        let Some(real_text) = &driving.transcript else {
            continue;
        };
        pairs.push(TranscriptPair {
            pair_id: record.video_id.clone(),
            real_text: real_text.clone(),
            fake_text: fake_text.clone(),
        });
    }
    Ok(pairs)
}

fn manifest_pair(manifest_path: &Path, fake_id: &str) -> Result<TranscriptPair, CliError> {
    let manifest = load_manifest(manifest_path)?;
    let record = manifest
        .record(fake_id)
        .ok_or_else(|| CliError::invalid(format!("video {fake_id} missing from manifest")))?;
    if record.label != Label::Fake {
        return Err(CliError::invalid(format!("video {fake_id} is not a fake")));
    }
    let fake_text = record.transcript.clone().ok_or_else(|| {
        CliError::invalid(format!("video {fake_id} carries no transcript"))
    })?;
    let driving_id = record.driving_video_id.clone().ok_or_else(|| {
        CliError::invalid(format!("video {fake_id} names no driving video"))
    })?;
    let driving = manifest.record(&driving_id).ok_or_else(|| {
        CliError::invalid(format!("driving video {driving_id} missing from manifest"))
    })?;
    let real_text = driving.transcript.clone().ok_or_else(|| {
        CliError::invalid(format!("driving video {driving_id} carries no transcript"))
    })?;
    Ok(TranscriptPair {
        pair_id: fake_id.to_string(),
        real_text,
        fake_text,
    })
}

// ------------------------------------------------- compare-transcripts --

#[derive(Debug, Args, Serialize)]
pub struct CompareTranscriptsArgs {
    /// Reference (real) transcript text
    #[arg(long, conflicts_with_all = ["pairs", "manifest"], requires = "fake")]
    pub real: Option<String>,
    /// Candidate (fake) transcript text
    #[arg(long, requires = "real")]
    pub fake: Option<String>,
    /// Pair id: the label in direct/text mode, the selector in pairs mode
    #[arg(long)]
    pub pair_id: Option<String>,
    /// JSON-lines pairs file (pair_id, real_text, fake_text per line)
    #[arg(long, conflicts_with = "manifest")]
    pub pairs: Option<PathBuf>,
    /// Manifest whose fake records link transcripts to their driving videos
    #[arg(long, requires = "fake_id")]
    pub manifest: Option<PathBuf>,
    /// Fake video id to score (manifest mode)
    #[arg(long, requires = "manifest")]
    pub fake_id: Option<String>,
}

fn select_pair(args: &CompareTranscriptsArgs) -> Result<TranscriptPair, CliError> {
    if let (Some(real), Some(fake)) = (&args.real, &args.fake) {
        return Ok(TranscriptPair {
            pair_id: args.pair_id.clone().unwrap_or_else(|| "pair".to_string()),
            real_text: real.clone(),
            fake_text: fake.clone(),
        });
    }
    if let Some(path) = &args.pairs {
        let mut pairs = read_pairs_file(path)?;
        return match &args.pair_id {
            Some(id) => pairs
                .into_iter()
                .find(|p| &p.pair_id == id)
                .ok_or_else(|| CliError::invalid(format!("pair {id} missing from file"))),
            None if pairs.len() == 1 => Ok(pairs.remove(0)),
            None => Err(CliError::invalid(format!(
                "file holds {} pairs; pass --pair-id to choose one",
                pairs.len()
            ))),
        };
    }
    if let (Some(manifest), Some(fake_id)) = (&args.manifest, &args.fake_id) {
        return manifest_pair(manifest, fake_id);
    }
    Err(CliError::invalid(
        "pass --real/--fake, or --pairs, or --manifest/--fake-id",
    ))
}

pub fn run_compare(args: &CompareTranscriptsArgs, _params: &Value) -> Result<Value, CliError> {
    let pair = select_pair(args)?;
    let real_t = tokenize(&pair.real_text);
    let fake_t = tokenize(&pair.fake_text);
    let record = score_pair(&pair.pair_id, &real_t, &fake_t)?;
    Ok(serde_json::to_value(&record).expect("record serializes"))
}

// -------------------------------------------------- report-linguistic --

#[derive(Debug, Args, Serialize)]
pub struct ReportLinguisticArgs {
    /// JSON-lines pairs file (pair_id, real_text, fake_text per line)
    #[arg(long, conflicts_with = "manifest")]
    pub pairs: Option<PathBuf>,
    /// Manifest whose fake records link transcripts to their driving videos
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Histogram bins per metric
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Report path; the extension picks the format (.json or .csv)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn collect_records(args: &ReportLinguisticArgs) -> Result<Vec<SimilarityRecord>, CliError> {
    let pairs = match (&args.pairs, &args.manifest) {
        (Some(path), None) => read_pairs_file(path)?,
        (None, Some(path)) => pairs_from_manifest(&load_manifest(path)?)?,
        _ => return Err(CliError::invalid("pass exactly one of --pairs or --manifest")),
    };
    if pairs.is_empty() {
        return Err(CliError::invalid("no transcript pairs to score"));
    }
    Ok(score_pairs(&pairs)?)
}

pub fn run_report(args: &ReportLinguisticArgs, params: &Value) -> Result<Value, CliError> {
    let records = collect_records(args)?;
    let report = aggregate_with_bins(&records, args.bins)?;
    if let Some(out) = &args.out {
        let mut text = match out.extension().and_then(|e| e.to_str()) {
            Some("json") => report.to_json(),
            Some("csv") => report.to_csv(),
            _ => {
                return Err(CliError::invalid(format!(
                    "{}: report extension must be .json or .csv",
                    out.display()
                )))
            }
        };
        if !text.ends_with('\n') {
            text.push('\n');
        }
        write_text_file(out, &text)?;
        write_sidecar(out, "report-linguistic", params)?;
    }
    let mut result = serde_json::to_value(&report).expect("report serializes");
    result["pairs_scored"] = json!(records.len());
    Ok(result)
}
