//! Transcript similarity metrics and distribution reporting.
//!
//! Transcripts are normalized deterministically (lowercase, punctuation
//! stripped, whitespace split) and compared with the classical similarity
//! suite: BLEU, Jaccard, cosine over term frequencies, token- and
//! character-level Levenshtein, ROUGE-1/2/L, and Jaro-Winkler. Batches of
//! per-pair scores aggregate into histogram + five-number-summary reports
//! emitted as CSV and JSON.
//!
//! Everything here is a pure function of its inputs; scoring across pairs
//! parallelizes safely.

mod aggregate;
mod error;
mod metrics;
mod pairs;
mod transcript;

pub use aggregate::{
    aggregate, aggregate_with_bins, BinCount, DistributionReport, FiveNumber, MetricDistribution,
    DEFAULT_BINS,
};
pub use error::{Result, TextError};
pub use metrics::{
    bleu, cosine, jaccard, jaro_winkler, levenshtein, levenshtein_chars, rouge_l, rouge_n,
    rouge_recall_ordering_holds, score_pair, RougeScore, SimilarityRecord, DEFAULT_BLEU_MAX_N,
};
pub use pairs::{read_pairs_csv, read_pairs_file, read_pairs_jsonl, score_pairs, TranscriptPair};
pub use transcript::{tokenize, Transcript};
