//! The LRM song format: domain types, parser and canonical serializer.
//!
//! An `.lrm` file records a song as lyrics aligned with beat types and note
//! durations, without pitch. A document holds a `TITLE:` line, a
//! `TIMESIG: <num> <den>` line, then one word per line. Each word is followed
//! by one group per syllable, a group being a beat code and a parenthesized
//! list of duration codes (several codes in one group tie the syllable across
//! notes). `*` separates phrases, `#` verses, `%` marks a bridge.
//!
//! ```text
//! TITLE: Red River Valley
//! TIMESIG: 4 4
//! From -0 (4)
//! valley 1 (2) 2 (4)
//! going 1 (4) 0 (2.5,2)
//! *
//! ```

mod parse;

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

pub use parse::{parse_lrm, ParseError, Parsed};

/// Exact beat arithmetic; durations and onsets are never floats.
pub type Beats = Ratio<i64>;

/// Meter of a song: `numerator` beats per measure, the `denominator` note
/// value carrying one beat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimeSignature {
    pub numerator: u32,
    pub denominator: u32,
}

impl TimeSignature {
    pub fn new(numerator: u32, denominator: u32) -> Self {
        TimeSignature { numerator, denominator }
    }

    pub fn beats_per_measure(&self) -> Beats {
        Beats::from_integer(self.numerator as i64)
    }
}

impl fmt::Display for TimeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// The base note value of a duration code (the integer part of the code).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NoteValue {
    Whole,
    Half,
    Quarter,
    Eighth,
    Sixteenth,
}

impl NoteValue {
    pub const ALL: [NoteValue; 5] = [
        NoteValue::Whole,
        NoteValue::Half,
        NoteValue::Quarter,
        NoteValue::Eighth,
        NoteValue::Sixteenth,
    ];

    /// The integer code: 1, 2, 4, 8 or 16.
    pub fn code(self) -> u32 {
        match self {
            NoteValue::Whole => 1,
            NoteValue::Half => 2,
            NoteValue::Quarter => 4,
            NoteValue::Eighth => 8,
            NoteValue::Sixteenth => 16,
        }
    }

    fn from_code(code: u32) -> Option<Self> {
        match code {
            1 => Some(NoteValue::Whole),
            2 => Some(NoteValue::Half),
            4 => Some(NoteValue::Quarter),
            8 => Some(NoteValue::Eighth),
            16 => Some(NoteValue::Sixteenth),
            _ => None,
        }
    }
}

/// One of the ten duration codes: 1, 2, 4, 8, 16 and their dotted forms
/// 1.5, 2.5, 4.5, 8.5, 16.5. A `.5` suffix means "dotted" (x 3/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DurationCode {
    pub base: NoteValue,
    pub dotted: bool,
}

impl Serialize for DurationCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DurationCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        DurationCode::from_token(&token)
            .ok_or_else(|| serde::de::Error::custom(format!("bad duration code {token:?}")))
    }
}

/// Raised when beats are requested for a meter the code table does not cover.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BeatsError {
    #[error("unsupported time signature denominator {0} (only /4 meters carry the duration code table)")]
    UnsupportedDenominator(u32),
}

impl DurationCode {
    pub fn new(base: NoteValue, dotted: bool) -> Self {
        DurationCode { base, dotted }
    }

    /// All ten codes, in table order (plain values first, then dotted).
    pub fn all() -> impl Iterator<Item = DurationCode> {
        [false, true]
            .into_iter()
            .flat_map(|dotted| NoteValue::ALL.into_iter().map(move |base| DurationCode { base, dotted }))
    }

    /// Parses a decimal code literal such as `4` or `2.5`.
    pub fn from_token(token: &str) -> Option<Self> {
        let (int_part, dotted) = match token.split_once('.') {
            None => (token, false),
            Some((int_part, "5")) => (int_part, true),
            Some(_) => return None,
        };
        let code: u32 = int_part.parse().ok()?;
        NoteValue::from_code(code).map(|base| DurationCode { base, dotted })
    }

    /// Length in beats under the given meter. A quarter note is one beat in
    /// any x/4 meter; a dotted code is 3/2 of its base value.
    pub fn beats(self, timesig: TimeSignature) -> Result<Beats, BeatsError> {
        if timesig.denominator != 4 {
            return Err(BeatsError::UnsupportedDenominator(timesig.denominator));
        }
        let base = Beats::new(timesig.denominator as i64, self.base.code() as i64);
        Ok(if self.dotted { base * Beats::new(3, 2) } else { base })
    }
}

impl fmt::Display for DurationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dotted {
            write!(f, "{}.5", self.base.code())
        } else {
            write!(f, "{}", self.base.code())
        }
    }
}

/// Beat type of a syllable group. Raw codes: 1 = downbeat, 2 = second strong
/// beat, 0 = weak beat; a leading `-` in the source marks pickup notes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BeatCode {
    pub raw: u8,
    pub pickup: bool,
}

/// Strong/weak classification of a beat code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeatClass {
    Strong,
    Weak,
}

impl BeatCode {
    pub fn new(raw: u8, pickup: bool) -> Self {
        debug_assert!(raw <= 2);
        BeatCode { raw, pickup }
    }

    /// Codes 1 and 2 are strong, 0 is weak. The pickup flag does not change
    /// the class.
    pub fn class(self) -> BeatClass {
        match self.raw {
            0 => BeatClass::Weak,
            _ => BeatClass::Strong,
        }
    }

    pub fn is_strong(self) -> bool {
        self.class() == BeatClass::Strong
    }

    /// Only code 1 is a downbeat.
    pub fn is_downbeat(self) -> bool {
        self.raw == 1
    }
}

impl fmt::Display for BeatCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pickup {
            write!(f, "-{}", self.raw)
        } else {
            write!(f, "{}", self.raw)
        }
    }
}

/// Classification of a beat code, as (class, is_downbeat).
pub fn beat_class(code: BeatCode) -> (BeatClass, bool) {
    (code.class(), code.is_downbeat())
}

/// One syllable: its beat type and the notes it is sung across. More than
/// one duration means the syllable is tied/melismatic over several notes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyllableGroup {
    pub beat: BeatCode,
    pub durations: Vec<DurationCode>,
}

/// A lyric word and its per-syllable groups; the group count is the word's
/// syllable count as written in the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordEntry {
    pub text: String,
    pub groups: Vec<SyllableGroup>,
}

/// Body item of a song: a word or a structural separator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SongItem {
    Word(WordEntry),
    PhraseBreak,
    VerseBreak,
    BridgeMark,
}

/// A parsed LRM document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Song {
    pub title: String,
    pub timesig: TimeSignature,
    pub items: Vec<SongItem>,
}

impl Song {
    pub fn words(&self) -> impl Iterator<Item = &WordEntry> {
        self.items.iter().filter_map(|item| match item {
            SongItem::Word(entry) => Some(entry),
            _ => None,
        })
    }

    pub fn word_count(&self) -> usize {
        self.words().count()
    }

    pub fn syllable_group_count(&self) -> usize {
        self.words().map(|w| w.groups.len()).sum()
    }

    /// The lyrics as plain text, one phrase per line. `*`, `#` and `%` all
    /// end the current line, so extractors see phrases as sentences.
    pub fn lyrics_text(&self) -> String {
        let mut lines: Vec<String> = Vec::new();
        let mut current: Vec<&str> = Vec::new();
        for item in &self.items {
            match item {
                SongItem::Word(entry) => current.push(&entry.text),
                _ => {
                    if !current.is_empty() {
                        lines.push(current.join(" "));
                        current.clear();
                    }
                }
            }
        }
        if !current.is_empty() {
            lines.push(current.join(" "));
        }
        lines.join("\n")
    }
}

/// Emits the canonical text form of a song. Parsing the output yields a
/// structurally equal song, and the emitter is idempotent across one
/// parse/serialize cycle.
pub fn serialize_lrm(song: &Song) -> String {
    let mut out = String::new();
    out.push_str("TITLE: ");
    out.push_str(&song.title);
    out.push('\n');
    out.push_str(&format!(
        "TIMESIG: {} {}\n",
        song.timesig.numerator, song.timesig.denominator
    ));
    for item in &song.items {
        match item {
            SongItem::Word(entry) => {
                out.push_str(&entry.text);
                for group in &entry.groups {
                    out.push(' ');
                    out.push_str(&group.beat.to_string());
                    out.push_str(" (");
                    let durs: Vec<String> = group.durations.iter().map(|d| d.to_string()).collect();
                    out.push_str(&durs.join(","));
                    out.push(')');
                }
                out.push('\n');
            }
            SongItem::PhraseBreak => out.push_str("*\n"),
            SongItem::VerseBreak => out.push_str("#\n"),
            SongItem::BridgeMark => out.push_str("%\n"),
        }
    }
    out
}
