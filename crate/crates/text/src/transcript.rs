//! Transcript normalization.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// A transcript: the original string plus its normalized token sequence.
///
/// Normalization is deterministic: lowercase, strip every Unicode
/// punctuation character (category P), split on whitespace. A raw string
/// containing no word material (empty or punctuation-only) yields an empty
/// token list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub raw: String,
    pub tokens: Vec<String>,
}

fn punctuation() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\p{P}+").expect("static pattern"))
}

/// Normalizes a raw string into a [`Transcript`].
pub fn tokenize(raw: &str) -> Transcript {
    let lowered = raw.to_lowercase();
    let stripped = punctuation().replace_all(&lowered, "");
    let tokens = stripped
        .split_whitespace()
        .map(str::to_string)
        .collect();
    Transcript {
        raw: raw.to_string(),
        tokens,
    }
}

impl Transcript {
    /// Builds a transcript directly from tokens (already normalized).
    pub fn from_tokens<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        Transcript {
            raw: tokens.join(" "),
            tokens,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Canonical normalized string: tokens joined by single spaces. This is
    /// what the character-level metrics operate on.
    pub fn normalized(&self) -> String {
        self.tokens.join(" ")
    }
}
