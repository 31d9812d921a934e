//! Transcript-pair ingestion (CSV or JSON-lines) and batch scoring.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TextError};
use crate::metrics::{score_pair, SimilarityRecord};
use crate::transcript::tokenize;

/// One real/fake transcript pair as ingested from disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptPair {
    pub pair_id: String,
    pub real_text: String,
    pub fake_text: String,
}

/// Reads pairs from a JSON-lines file: one object per line with fields
/// `pair_id`, `real_text`, `fake_text`. Blank lines are skipped; bad lines
/// fail with their 1-based line number.
pub fn read_pairs_jsonl(path: impl AsRef<Path>) -> Result<Vec<TranscriptPair>> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|e| TextError::io(path.display().to_string(), e))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let pair: TranscriptPair =
            serde_json::from_str(line).map_err(|e| TextError::BadFormat {
                detail: format!("{}:{}: {e}", path.display(), i + 1),
            })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Reads pairs from a CSV file with header `pair_id,real_text,fake_text`
/// (RFC 4180 quoting, so transcripts may contain commas and newlines).
pub fn read_pairs_csv(path: impl AsRef<Path>) -> Result<Vec<TranscriptPair>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| TextError::BadFormat {
        detail: format!("{}: {e}", path.display()),
    })?;
    let mut pairs = Vec::new();
    for row in reader.deserialize() {
        let pair: TranscriptPair = row.map_err(|e| TextError::BadFormat {
            detail: format!("{}: {e}", path.display()),
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Reads pairs from either supported format, chosen by extension:
/// `.csv` parses as CSV, anything else as JSON-lines.
pub fn read_pairs_file(path: impl AsRef<Path>) -> Result<Vec<TranscriptPair>> {
    let is_csv = path
        .as_ref()
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        read_pairs_csv(path)
    } else {
        read_pairs_jsonl(path)
    }
}

/// Tokenizes and scores every pair. Output order matches input order; the
/// work parallelizes across pairs. The first failing pair's error is
/// reported with its pair id.
pub fn score_pairs(pairs: &[TranscriptPair]) -> Result<Vec<SimilarityRecord>> {
    pairs
        .par_iter()
        .map(|p| {
            let real_t = tokenize(&p.real_text);
            let fake_t = tokenize(&p.fake_text);
            score_pair(&p.pair_id, &real_t, &fake_t).map_err(|e| TextError::BadFormat {
                detail: format!("pair {}: {e}", p.pair_id),
            })
        })
        .collect()
}
