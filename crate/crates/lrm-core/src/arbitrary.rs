//! Proptest strategies for generating valid songs.
//!
//! Enabled by the `arbitrary` feature; used by the round-trip and
//! robustness property suites.

use proptest::prelude::*;

use crate::lrm::{
    BeatCode, DurationCode, NoteValue, Song, SongItem, SyllableGroup, TimeSignature, WordEntry,
};

pub fn duration_code() -> impl Strategy<Value = DurationCode> {
    (
        prop::sample::select(NoteValue::ALL.to_vec()),
        prop::bool::ANY,
    )
        .prop_map(|(base, dotted)| DurationCode::new(base, dotted))
}

pub fn beat_code() -> impl Strategy<Value = BeatCode> {
    (0u8..=2, prop::bool::weighted(0.15)).prop_map(|(raw, pickup)| BeatCode::new(raw, pickup))
}

pub fn syllable_group() -> impl Strategy<Value = SyllableGroup> {
    (beat_code(), prop::collection::vec(duration_code(), 1..4))
        .prop_map(|(beat, durations)| SyllableGroup { beat, durations })
}

/// Lyric tokens: letters with optional internal apostrophes/hyphens, never
/// colliding with separators or header keywords.
pub fn word_text() -> impl Strategy<Value = String> {
    "[A-Za-z][a-z'\\-]{0,11}".prop_map(|s| s.trim_matches(|c| c == '\'' || c == '-').to_string())
        .prop_filter("non-empty after trim", |s| !s.is_empty())
}

pub fn word_entry() -> impl Strategy<Value = WordEntry> {
    (word_text(), prop::collection::vec(syllable_group(), 1..4))
        .prop_map(|(text, groups)| WordEntry { text, groups })
}

pub fn song_item() -> impl Strategy<Value = SongItem> {
    prop_oneof![
        8 => word_entry().prop_map(SongItem::Word),
        1 => Just(SongItem::PhraseBreak),
        1 => Just(SongItem::VerseBreak),
        1 => Just(SongItem::BridgeMark),
    ]
}

pub fn time_signature() -> impl Strategy<Value = TimeSignature> {
    prop_oneof![
        4 => Just(TimeSignature::new(4, 4)),
        4 => Just(TimeSignature::new(3, 4)),
        1 => (1u32..=12, prop::sample::select(vec![2u32, 4, 8]))
            .prop_map(|(n, d)| TimeSignature::new(n, d)),
    ]
}

/// Titles that survive one trim pass (the parser trims header remainders).
pub fn title() -> impl Strategy<Value = String> {
    "[A-Za-z0-9][A-Za-z0-9 ',\\-]{0,24}".prop_map(|s| s.trim().to_string())
}

pub fn song() -> impl Strategy<Value = Song> {
    (title(), time_signature(), prop::collection::vec(song_item(), 0..24))
        .prop_map(|(title, timesig, items)| Song { title, timesig, items })
}

/// Songs restricted to /4 meters, for score derivation properties.
pub fn derivable_song() -> impl Strategy<Value = Song> {
    (
        title(),
        prop_oneof![Just(TimeSignature::new(4, 4)), Just(TimeSignature::new(3, 4))],
        prop::collection::vec(song_item(), 0..24),
    )
        .prop_map(|(title, timesig, items)| Song { title, timesig, items })
}
