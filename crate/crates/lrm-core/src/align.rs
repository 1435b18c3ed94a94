//! Joins lyrical annotations with beat classes into observation records.
//!
//! Every statistic downstream consumes [`LLERecord`]s: one per word (keyword
//! flag as the stress) or one per syllable group (dictionary stress). The
//! beat fields come straight from the group's beat code, so wordless melisma
//! continuation notes never produce records.

use serde::Serialize;

use crate::keywords::{Extractor, WordMark};
use crate::lexicon::SyllableAnnotation;
use crate::lrm::{Song, TimeSignature};

/// Which lyrical level a record observes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LleKind {
    Word,
    Syllable,
}

impl std::fmt::Display for LleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LleKind::Word => write!(f, "word"),
            LleKind::Syllable => write!(f, "syllable"),
        }
    }
}

/// Which syllable group carries a multi-syllable word's beat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordBeatMode {
    /// The first group's beat (matches the published word-level examples).
    FirstSyllable,
    /// Strong if any group is strong; downbeat if any group is a downbeat.
    /// Offered for sensitivity analysis only.
    AnyStrongSyllable,
}

impl Default for WordBeatMode {
    fn default() -> Self {
        WordBeatMode::FirstSyllable
    }
}

/// One alignment observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LLERecord {
    pub song: String,
    pub timesig: TimeSignature,
    pub kind: LleKind,
    pub token: String,
    /// KW (word) or SS (syllable) when true; NKW or US when false.
    pub stressed: bool,
    pub beat_strong: bool,
    pub is_downbeat: bool,
    pub pickup: bool,
    /// Which extractor produced the stress flag; word records only.
    pub extractor: Option<Extractor>,
}

/// One record per syllable group, stress from the reconciled annotation.
///
/// `annotations` must be reconciled to the song's group counts
/// (see [`crate::lexicon::annotate_song`]).
pub fn align_syllables(
    song_id: &str,
    song: &Song,
    annotations: &[SyllableAnnotation],
) -> Vec<LLERecord> {
    let mut records = Vec::with_capacity(song.syllable_group_count());
    for (entry, annotation) in song.words().zip(annotations) {
        debug_assert_eq!(entry.groups.len(), annotation.syllables.len());
        for (group, syllable) in entry.groups.iter().zip(&annotation.syllables) {
            records.push(LLERecord {
                song: song_id.to_string(),
                timesig: song.timesig,
                kind: LleKind::Syllable,
                token: syllable.fragment.clone(),
                stressed: syllable.stressed,
                beat_strong: group.beat.is_strong(),
                is_downbeat: group.beat.is_downbeat(),
                pickup: group.beat.pickup,
                extractor: None,
            });
        }
    }
    records
}

/// One record per word entry; the word's beat is its first group's beat
/// (or any strong group under [`WordBeatMode::AnyStrongSyllable`]).
pub fn align_words(
    song_id: &str,
    song: &Song,
    marks: &[WordMark],
    extractor: Extractor,
    mode: WordBeatMode,
) -> Vec<LLERecord> {
    let mut records = Vec::with_capacity(song.word_count());
    for (entry, mark) in song.words().zip(marks) {
        let first = entry.groups[0].beat;
        let (beat_strong, is_downbeat) = match mode {
            WordBeatMode::FirstSyllable => (first.is_strong(), first.is_downbeat()),
            WordBeatMode::AnyStrongSyllable => (
                entry.groups.iter().any(|g| g.beat.is_strong()),
                entry.groups.iter().any(|g| g.beat.is_downbeat()),
            ),
        };
        records.push(LLERecord {
            song: song_id.to_string(),
            timesig: song.timesig,
            kind: LleKind::Word,
            token: entry.text.clone(),
            stressed: mark.is_keyword,
            beat_strong,
            is_downbeat,
            pickup: first.pickup,
            extractor: Some(extractor),
        });
    }
    records
}
