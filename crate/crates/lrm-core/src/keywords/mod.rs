//! Unsupervised keyword extraction over a song's lyrics.
//!
//! Two extractors are provided: RAKE ([`rake_extract`]) scores words by
//! degree/frequency over stopword-delimited phrases, YAKE ([`yake_extract`])
//! combines five statistical term features into a lower-is-better score.
//! Both are deterministic: ties break lexicographically, and a song's word
//! occurrences all share one keyword flag.

pub mod rake;
pub mod yake;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::lrm::Song;
use crate::text::normalize_token;

pub use rake::rake_extract;
pub use yake::{yake_extract, YakeAnalysis};

/// Bundled general-English stoplist, id `fox1989`.
pub const BUNDLED_STOPLIST: &str = include_str!("../../data/stoplist_fox1989.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extractor {
    Rake,
    Yake,
}

impl std::fmt::Display for Extractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extractor::Rake => write!(f, "rake"),
            Extractor::Yake => write!(f, "yake"),
        }
    }
}

/// How many scored terms become keywords. Exactly one rule is active.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// The best `k` terms.
    TopK(usize),
    /// Every term at least as good as the threshold (RAKE: score >=,
    /// YAKE: score <=).
    ScoreThreshold(f64),
    /// This share of the distinct non-stopword unigrams, rounded half up.
    Proportion(f64),
}

/// Extraction knobs; all of them are echoed into report metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractorParams {
    /// Longest candidate phrase, in words. With 1 the candidates are the
    /// words themselves.
    pub max_ngram: usize,
    pub stoplist_id: String,
    pub selection: Selection,
    /// Similarity above which YAKE drops a near-duplicate candidate.
    pub dedup_threshold: f64,
}

impl Default for ExtractorParams {
    fn default() -> Self {
        ExtractorParams {
            max_ngram: 1,
            stoplist_id: "fox1989".into(),
            selection: Selection::Proportion(0.5),
            dedup_threshold: 0.9,
        }
    }
}

/// A stopword list: one word per line, `#` comments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    pub id: String,
    words: BTreeSet<String>,
}

impl Stoplist {
    pub fn parse(id: impl Into<String>, text: &str) -> Stoplist {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .map(|line| line.to_lowercase())
            .collect();
        Stoplist { id: id.into(), words }
    }

    pub fn bundled() -> Stoplist {
        Stoplist::parse("fox1989", BUNDLED_STOPLIST)
    }

    pub fn empty(id: impl Into<String>) -> Stoplist {
        Stoplist { id: id.into(), words: BTreeSet::new() }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.words.contains(term)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Extraction result: scored candidate terms and the selected keyword
/// unigrams (multi-word candidates contribute their member words).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeywordSet {
    pub extractor: Extractor,
    /// Candidate term -> score. RAKE scores ascend with importance, YAKE
    /// scores descend (lower is better).
    pub scored: BTreeMap<String, f64>,
    pub selected: BTreeSet<String>,
    pub params: ExtractorParams,
}

impl KeywordSet {
    pub fn is_selected(&self, token: &str) -> bool {
        self.selected.contains(&normalize_token(token))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("lyrics are empty")]
    EmptyLyrics,
}

/// A token inside a sentence: the raw spelling and its normalized term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub raw: String,
    pub term: String,
}

/// Splits lyrics into sentences of tokens. Line breaks and sentence
/// punctuation both end a sentence; tokens that normalize to nothing stay
/// in place as phrase breakers.
pub(crate) fn tokenize(text: &str) -> Vec<Vec<Token>> {
    text.split(|c: char| matches!(c, '\n' | '\r' | '.' | ',' | '!' | '?' | ';' | ':' | '\u{2026}'))
        .map(|sentence| {
            sentence
                .split_whitespace()
                .map(|raw| Token {
                    raw: raw.to_string(),
                    term: normalize_token(raw),
                })
                .collect::<Vec<_>>()
        })
        .filter(|tokens| !tokens.is_empty())
        .collect()
}

/// Distinct non-stopword terms in the tokenized text: the unigram candidate
/// universe that proportional selection counts against.
pub(crate) fn distinct_unigrams(sentences: &[Vec<Token>], stoplist: &Stoplist) -> BTreeSet<String> {
    sentences
        .iter()
        .flatten()
        .filter(|t| !t.term.is_empty() && !stoplist.contains(&t.term))
        .map(|t| t.term.clone())
        .collect()
}

pub(crate) fn proportion_count(p: f64, distinct: usize) -> usize {
    ((p * distinct as f64) + 0.5).floor() as usize
}

/// Marks every word occurrence of a song: keyword iff its normalized token
/// is in the selected set. Occurrences of one token always agree.
pub fn mark_words(song: &Song, kws: &KeywordSet) -> Vec<WordMark> {
    song.words()
        .map(|entry| {
            let normalized = normalize_token(&entry.text);
            WordMark {
                is_keyword: kws.selected.contains(&normalized),
                normalized,
                text: entry.text.clone(),
            }
        })
        .collect()
}

/// Keyword flag for one word occurrence, in song order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WordMark {
    pub text: String,
    pub normalized: String,
    pub is_keyword: bool,
}
