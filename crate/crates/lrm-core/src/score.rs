//! Music-score derivation from a parsed song.
//!
//! The LRM format records beat types and durations only; everything else —
//! note onsets, measure boundaries, the pickup measure — is computed here
//! with exact rational arithmetic. The derived table doubles as a validator:
//! beat codes that disagree with their computed metrical position point at
//! typing mistakes in the source file.


use crate::diagnostics::Diagnostic;
use crate::lrm::{Beats, BeatCode, DurationCode, Song, SongItem, TimeSignature};

/// Default pitch for every derived note; the format collects no pitch.
pub const DEFAULT_PITCH: &str = "C4";

/// One row of the derived score: a single note.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct NoteEvent {
    pub duration_code: DurationCode,
    /// Note length in beats under the song's meter.
    #[serde(with = "beats_serde")]
    pub beats: Beats,
    /// Beat code of the syllable group this note belongs to.
    pub beat: BeatCode,
    /// Lyric token, present only on the first note of a word.
    pub word: Option<String>,
    /// Word-local syllable ordinal, present on the first note of each
    /// syllable group; tied continuation notes carry `None`.
    pub syllable_index: Option<usize>,
    /// Cumulative beats from the start of the song.
    #[serde(with = "beats_serde")]
    pub onset: Beats,
    /// Measure index; 0 is the pickup measure when the song has one.
    pub measure: usize,
}

impl NoteEvent {
    pub fn pitch(&self) -> &'static str {
        DEFAULT_PITCH
    }

    /// Whether this note starts a syllable (melisma continuations do not).
    pub fn starts_syllable(&self) -> bool {
        self.syllable_index.is_some()
    }

    pub fn end(&self) -> Beats {
        self.onset + self.beats
    }
}

/// A measure of the derived score.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Measure {
    pub index: usize,
    /// Grid onset of the measure (not necessarily its first event's onset).
    #[serde(with = "beats_serde")]
    pub start: Beats,
    pub events: Vec<NoteEvent>,
    #[serde(with = "beats_serde")]
    pub total_beats: Beats,
    /// True for the anacrusis measure and for partial measures re-opened by
    /// a pickup after a verse break.
    pub pickup: bool,
}

impl Measure {
    pub fn end(&self) -> Beats {
        self.start + self.total_beats
    }
}

/// Full derivation result: events, measures and structural findings.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedScore {
    pub timesig: TimeSignature,
    pub events: Vec<NoteEvent>,
    pub measures: Vec<Measure>,
    pub diagnostics: Vec<Diagnostic>,
}

pub use crate::lrm::BeatsError;

/// Derives the note event sequence of a song: one event per duration code,
/// in source order, each carrying onset and measure index.
pub fn derive_score(song: &Song) -> Result<Vec<NoteEvent>, BeatsError> {
    derive(song).map(|d| d.events)
}

/// Derives events and measures in one pass.
pub fn derive(song: &Song) -> Result<DerivedScore, BeatsError> {
    let timesig = song.timesig;
    let numerator = timesig.beats_per_measure();
    let mut events: Vec<NoteEvent> = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();

    // The metrical grid: measures of `numerator` beats anchored at
    // `grid_origin`. While `in_pickup`, events accumulate into the current
    // (partial) measure until the first plain downbeat fixes the origin.
    let mut onset = Beats::from_integer(0);
    let mut grid_origin = Beats::from_integer(0);
    let mut in_pickup = true;
    let mut pickup_measure_index = 0usize;
    let mut measure_base = 0usize; // index offset of the current grid section
    let mut after_verse_break = false;
    let mut pickup_measures: Vec<usize> = vec![0];

    for item in &song.items {
        let entry = match item {
            SongItem::Word(entry) => entry,
            SongItem::VerseBreak => {
                after_verse_break = true;
                continue;
            }
            _ => continue,
        };

        for (syllable_index, group) in entry.groups.iter().enumerate() {
            // A pickup-flagged group right after a verse break re-opens a
            // partial measure and re-anchors the grid there.
            if after_verse_break && group.beat.pickup && !in_pickup {
                let elapsed = onset - grid_origin;
                let finished = (elapsed / numerator).ceil().to_integer() as usize;
                measure_base += finished;
                pickup_measure_index = measure_base + 1;
                measure_base += 1;
                pickup_measures.push(pickup_measure_index);
                grid_origin = onset;
                in_pickup = true;
                diagnostics.push(Diagnostic::info(
                    "score/verse-pickup",
                    format!(
                        "pickup after verse break re-opens a partial measure at onset {onset} \
                         (assuming a metrical reset)"
                    ),
                ));
            }
            if group.beat.pickup && !in_pickup {
                diagnostics.push(Diagnostic::info(
                    "score/stray-pickup",
                    format!(
                        "pickup flag on {:?} at onset {onset} is not at a song or verse start",
                        entry.text
                    ),
                ));
            }

            for (note_index, duration_code) in group.durations.iter().enumerate() {
                let beats = duration_code.beats(timesig)?;
                if in_pickup && group.beat.raw == 1 && !group.beat.pickup {
                    // First plain downbeat: the grid starts here.
                    in_pickup = false;
                    grid_origin = onset;
                }
                let measure = if in_pickup {
                    pickup_measure_index
                } else {
                    let offset = onset - grid_origin;
                    measure_base + 1 + (offset / numerator).floor().to_integer() as usize
                };
                events.push(NoteEvent {
                    duration_code: *duration_code,
                    beats,
                    beat: group.beat,
                    word: (syllable_index == 0 && note_index == 0).then(|| entry.text.clone()),
                    syllable_index: (note_index == 0).then_some(syllable_index),
                    onset,
                    measure,
                });
                onset += beats;
            }
        }
        after_verse_break = false;
    }

    let measures = build_measures(&events, timesig, &pickup_measures);
    Ok(DerivedScore { timesig, events, measures, diagnostics })
}

fn build_measures(events: &[NoteEvent], timesig: TimeSignature, pickup_measures: &[usize]) -> Vec<Measure> {
    let numerator = timesig.beats_per_measure();
    let mut measures: Vec<Measure> = Vec::new();
    for event in events {
        let is_new = measures.last().map(|m: &Measure| m.index != event.measure).unwrap_or(true);
        if is_new {
            let pickup = pickup_measures.contains(&event.measure);
            let start = match measures.last() {
                // Pickup measures are anchored at their first event, and so
                // is the first regular measure (its first event is the
                // downbeat the grid was anchored on); later measures sit on
                // the grid after their predecessor.
                _ if pickup => event.onset,
                None => event.onset,
                Some(prev) => {
                    let gap = event.measure - prev.index;
                    let base = if prev.pickup {
                        prev.start + prev.total_beats
                    } else {
                        prev.start + numerator
                    };
                    base + numerator * Beats::from_integer(gap as i64 - 1)
                }
            };
            measures.push(Measure {
                index: event.measure,
                start,
                events: Vec::new(),
                total_beats: Beats::from_integer(0),
                pickup,
            });
        }
        let measure = measures.last_mut().unwrap();
        measure.events.push(event.clone());
        measure.total_beats += event.beats;
    }
    measures
}

/// Groups already-derived events into measures. Events carry their measure
/// index from [`derive`]; this reconstructs boundaries and totals for
/// separator-free event streams (and matches [`derive`] whenever the song
/// has no mid-song metrical reset).
pub fn segment_measures(events: &[NoteEvent], timesig: TimeSignature) -> Vec<Measure> {
    let has_pickup = events.iter().any(|e| e.measure == 0);
    let pickups: Vec<usize> = if has_pickup { vec![0] } else { vec![] };
    build_measures(events, timesig, &pickups)
}

/// Checks every measure's beat-code placements and totals.
///
/// Emitted findings, all warnings:
/// * `meter/downbeat-off-grid` — code 1 away from the measure start;
/// * `meter/weak-on-downbeat` — code 0 or 2 at the measure start;
/// * `meter/second-strong-misplaced` — code 2 off the mid-measure strong
///   position (for even numerators; any code 2 in odd meters);
/// * `meter/short-measure` / `meter/long-measure` — wrong totals. Pickup
///   measures and a short final measure (an excerpt or anacrusis
///   complement) are exempt;
/// * `meter/barline-straddle` — a note crossing its measure's end.
///
/// Placement checks apply to syllable-initial notes only; tied continuation
/// notes inherit their group's code without claiming a new placement.
pub fn validate_meter(measures: &[Measure], timesig: TimeSignature) -> Vec<Diagnostic> {
    let numerator = timesig.beats_per_measure();
    let second_strong_offset: Option<Beats> = if timesig.numerator % 2 == 0 {
        Some(numerator / Beats::from_integer(2))
    } else {
        None
    };
    let mut diagnostics = Vec::new();
    let last_index = measures.last().map(|m| m.index);

    for measure in measures {
        let is_final = Some(measure.index) == last_index;
        if !measure.pickup {
            if measure.total_beats < numerator && !is_final {
                diagnostics.push(Diagnostic::warning(
                    "meter/short-measure",
                    format!(
                        "measure {} totals {} beats, expected {}",
                        measure.index, measure.total_beats, numerator
                    ),
                ));
            }
            if measure.total_beats > numerator {
                diagnostics.push(Diagnostic::warning(
                    "meter/long-measure",
                    format!(
                        "measure {} totals {} beats, expected {}",
                        measure.index, measure.total_beats, numerator
                    ),
                ));
            }
        } else if measure.total_beats >= numerator {
            diagnostics.push(Diagnostic::warning(
                "meter/long-pickup",
                format!(
                    "pickup measure {} totals {} beats, not less than {}",
                    measure.index, measure.total_beats, numerator
                ),
            ));
        }

        for event in &measure.events {
            if event.end() > measure.start + numerator && !measure.pickup {
                diagnostics.push(Diagnostic::warning(
                    "meter/barline-straddle",
                    format!(
                        "note at onset {} ({} beats) crosses the end of measure {}",
                        event.onset, event.beats, measure.index
                    ),
                ));
            }
            if !event.starts_syllable() {
                continue;
            }
            if measure.pickup {
                if event.beat.raw != 0 {
                    diagnostics.push(Diagnostic::warning(
                        "meter/strong-code-in-pickup",
                        format!(
                            "beat code {} at onset {} inside a pickup measure",
                            event.beat, event.onset
                        ),
                    ));
                }
                continue;
            }
            let offset = event.onset - measure.start;
            let zero = Beats::from_integer(0);
            match event.beat.raw {
                1 if offset != zero => diagnostics.push(Diagnostic::warning(
                    "meter/downbeat-off-grid",
                    format!(
                        "downbeat code at onset {} of measure {}, {} beats after the barline",
                        event.onset, measure.index, offset
                    ),
                )),
                0 | 2 if offset == zero => diagnostics.push(Diagnostic::warning(
                    "meter/weak-on-downbeat",
                    format!(
                        "beat code {} on the downbeat of measure {} (expected 1)",
                        event.beat, measure.index
                    ),
                )),
                2 => match second_strong_offset {
                    Some(expected) if offset != expected => {
                        diagnostics.push(Diagnostic::warning(
                            "meter/second-strong-misplaced",
                            format!(
                                "second-strong code at offset {} of measure {}, expected {}",
                                offset, measure.index, expected
                            ),
                        ))
                    }
                    None => diagnostics.push(Diagnostic::warning(
                        "meter/second-strong-misplaced",
                        format!(
                            "second-strong code at offset {} of measure {}: {} has no second strong beat",
                            offset, measure.index, timesig
                        ),
                    )),
                    _ => {}
                },
                _ => {}
            }
        }
    }
    diagnostics
}

/// Renders the four-column derived-score table with dashed measure
/// separators, tab-delimited.
pub fn score_table(score: &DerivedScore) -> String {
    let mut out = String::from("Pitch\tDuration\tBeat\tWord\n");
    for (i, measure) in score.measures.iter().enumerate() {
        if i > 0 {
            out.push_str("--------\n");
        }
        for event in &measure.events {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                event.pitch(),
                event.duration_code,
                event.beat.raw,
                event.word.as_deref().unwrap_or("")
            ));
        }
    }
    out
}

mod beats_serde {
    use super::Beats;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(beats: &Beats, serializer: S) -> Result<S::Ok, S::Error> {
        if beats.is_integer() {
            serializer.serialize_str(&beats.numer().to_string())
        } else {
            serializer.serialize_str(&format!("{}/{}", beats.numer(), beats.denom()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrm::parse_lrm;

    fn song(timesig: &str, body: &str) -> Song {
        parse_lrm(&format!("TITLE: t\nTIMESIG: {timesig}\n{body}"))
            .expect("fixture parses")
            .song
    }

    fn ratio(n: i64, d: i64) -> Beats {
        Beats::new(n, d)
    }

    #[test]
    fn derives_one_event_per_duration_code() {
        let song = song("4 4", "say 1 (2)\nyou 2 (4)\nare 0 (4)\n");
        let derived = derive(&song).unwrap();
        let beats: Vec<Beats> = derived.events.iter().map(|e| e.beats).collect();
        assert_eq!(beats, vec![ratio(2, 1), ratio(1, 1), ratio(1, 1)]);
        assert_eq!(derived.measures.len(), 1);
        assert_eq!(derived.measures[0].total_beats, ratio(4, 1));
        assert!(!derived.measures[0].pickup);
        assert_eq!(derived.measures[0].index, 1);
    }

    #[test]
    fn melisma_word_text_sits_on_the_first_note_only() {
        let song = song("4 4", "going 1 (4) 0 (2.5,2)\n");
        let events = derive_score(&song).unwrap();
        assert_eq!(events.len(), 3);
        assert_eq!(events[0].word.as_deref(), Some("going"));
        assert_eq!(events[0].beats, ratio(1, 1));
        assert!(events[0].beat.is_downbeat());
        assert_eq!(events[1].word, None);
        assert_eq!(events[1].syllable_index, Some(1));
        assert_eq!(events[1].beats, ratio(3, 1));
        assert!(!events[1].beat.is_strong());
        assert_eq!(events[2].word, None);
        assert_eq!(events[2].syllable_index, None, "tied note is a continuation");
        assert_eq!(events[2].beats, ratio(2, 1));
    }

    #[test]
    fn empty_song_derives_empty_score() {
        let song = song("4 4", "");
        let derived = derive(&song).unwrap();
        assert!(derived.events.is_empty());
        assert!(derived.measures.is_empty());
    }

    #[test]
    fn single_whole_note_fills_one_measure() {
        let song = song("4 4", "all 1 (1)\n");
        let derived = derive(&song).unwrap();
        assert_eq!(derived.measures.len(), 1);
        assert_eq!(derived.measures[0].total_beats, ratio(4, 1));
        assert!(validate_meter(&derived.measures, song.timesig).is_empty());
    }

    #[test]
    fn three_four_quarters_split_into_two_measures() {
        let song = song("3 4", "a 1 (4)\nb 0 (4)\nc 0 (4)\nd 1 (4)\ne 0 (4)\nf 0 (4)\n");
        let derived = derive(&song).unwrap();
        assert_eq!(derived.measures.len(), 2);
        assert!(derived.measures.iter().all(|m| m.total_beats == ratio(3, 1)));
        assert_eq!(derived.measures[0].index, 1);
        assert_eq!(derived.measures[1].start, ratio(3, 1));
        assert!(validate_meter(&derived.measures, song.timesig).is_empty());
    }

    #[test]
    fn pickup_events_form_measure_zero() {
        let source = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/red_river_valley.lrm"
        ))
        .unwrap();
        let song = parse_lrm(&source).unwrap().song;
        let derived = derive(&song).unwrap();

        let m0 = &derived.measures[0];
        assert!(m0.pickup);
        assert_eq!(m0.total_beats, ratio(2, 1));
        assert_eq!(m0.events.len(), 2);
        assert_eq!(m0.events[0].word.as_deref(), Some("From"));
        assert_eq!(m0.events[1].word.as_deref(), Some("this"));

        // Measures 1..=7 are full; the final tied half stands alone.
        for measure in &derived.measures[1..8] {
            assert_eq!(measure.total_beats, ratio(4, 1), "measure {}", measure.index);
            assert!(!measure.pickup);
        }
        assert_eq!(derived.measures.len(), 9);
        assert_eq!(derived.measures[8].total_beats, ratio(2, 1));

        // Measure k >= 1 starts exactly at pickup_total + (k-1) * numerator.
        for measure in &derived.measures[1..] {
            let expected = ratio(2, 1) + ratio(4, 1) * Beats::from_integer(measure.index as i64 - 1);
            assert_eq!(measure.start, expected, "measure {}", measure.index);
        }

        assert!(validate_meter(&derived.measures, song.timesig).is_empty());
        assert!(derived.diagnostics.is_empty());
    }

    #[test]
    fn fixture_reproduces_the_derived_score_table() {
        let source = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/red_river_valley.lrm"
        ))
        .unwrap();
        let song = parse_lrm(&source).unwrap().song;
        let derived = derive(&song).unwrap();

        // (duration code, beat code, word, measure) per note, in order.
        let expected: Vec<(&str, u8, Option<&str>, usize)> = vec![
            ("4", 0, Some("From"), 0),
            ("4", 0, Some("this"), 0),
            ("2", 1, Some("valley"), 1),
            ("4", 2, None, 1),
            ("4", 0, Some("they"), 1),
            ("2", 1, Some("say"), 2),
            ("4", 2, Some("you"), 2),
            ("4", 0, Some("are"), 2),
            ("4", 1, Some("going"), 3),
            ("2.5", 0, None, 3),
            ("2", 0, None, 4),
            ("4", 0, Some("We"), 4),
            ("4", 0, Some("shall"), 4),
            ("2", 1, Some("miss"), 5),
            ("4", 2, Some("your"), 5),
            ("4", 0, Some("bright"), 5),
            ("2", 1, Some("eyes"), 6),
            ("4", 2, Some("and"), 6),
            ("4", 0, Some("sweet"), 6),
            ("1", 1, Some("smile"), 7),
            // The source ties smile across the following barline; the printed
            // excerpt stops at the whole note.
            ("2", 1, None, 8),
        ];
        assert_eq!(derived.events.len(), expected.len());
        for (event, (code, beat, word, measure)) in derived.events.iter().zip(&expected) {
            assert_eq!(event.duration_code.to_string(), *code);
            assert_eq!(event.beat.raw, *beat);
            assert_eq!(event.word.as_deref(), *word);
            assert_eq!(event.measure, *measure);
            assert_eq!(event.pitch(), "C4");
        }

        let table = score_table(&derived);
        assert!(table.starts_with("Pitch\tDuration\tBeat\tWord\n"));
        assert!(table.contains("C4\t2\t1\tvalley\n"));
        assert!(table.contains("--------\nC4\t2\t1\tsay\n"));
    }

    #[test]
    fn onsets_increase_and_beats_are_conserved() {
        let song = song("4 4", "From -0 (4)\nvalley 1 (2) 2 (4)\nthey 0 (4)\nsmile 1 (1,2)\n");
        let derived = derive(&song).unwrap();
        for pair in derived.events.windows(2) {
            assert!(pair[0].onset < pair[1].onset);
        }
        let event_total: Beats = derived.events.iter().map(|e| e.beats).sum();
        let measure_total: Beats = derived.measures.iter().map(|m| m.total_beats).sum();
        assert_eq!(event_total, measure_total);
    }

    #[test]
    fn word_and_syllable_counts_are_conserved() {
        let song = song("4 4", "From -0 (4)\nvalley 1 (2) 2 (4)\ngoing 1 (4) 0 (2.5,2)\n");
        let events = derive_score(&song).unwrap();
        let with_word = events.iter().filter(|e| e.word.is_some()).count();
        let with_syllable = events.iter().filter(|e| e.starts_syllable()).count();
        assert_eq!(with_word, song.word_count());
        assert_eq!(with_syllable, song.syllable_group_count());
    }

    #[test]
    fn segment_measures_matches_derive_without_resets() {
        let source = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/red_river_valley.lrm"
        ))
        .unwrap();
        let song = parse_lrm(&source).unwrap().song;
        let derived = derive(&song).unwrap();
        assert_eq!(segment_measures(&derived.events, song.timesig), derived.measures);
    }

    #[test]
    fn second_strong_mid_measure_is_clean_in_common_time() {
        let song = song("4 4", "say 1 (2)\nyou 2 (4)\n");
        let derived = derive(&song).unwrap();
        // "you" carries code 2 at offset 2 = numerator / 2: no finding, and
        // the short final measure of this excerpt is exempt as well.
        assert!(validate_meter(&derived.measures, song.timesig).is_empty());
    }

    #[test]
    fn downbeat_off_grid_is_flagged() {
        let song = song("4 4", "one 1 (4)\ntwo 1 (2)\n");
        let derived = derive(&song).unwrap();
        let findings = validate_meter(&derived.measures, song.timesig);
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].code, "meter/downbeat-off-grid");
    }

    #[test]
    fn weak_code_on_the_downbeat_is_flagged() {
        let song = song("4 4", "one 1 (1)\ntwo 0 (4)\nthree 0 (4)\n");
        let derived = derive(&song).unwrap();
        let findings = validate_meter(&derived.measures, song.timesig);
        assert!(findings.iter().any(|d| d.code == "meter/weak-on-downbeat"));
    }

    #[test]
    fn misplaced_codes_are_flagged() {
        // "c" claims a downbeat one beat early; "d" then opens measure 2
        // with a weak code.
        let song = song("4 4", "a 1 (2)\nb 0 (4)\nc 1 (4)\nd 0 (4)\n");
        let derived = derive(&song).unwrap();
        let findings = validate_meter(&derived.measures, song.timesig);
        let codes: Vec<&str> = findings.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec!["meter/downbeat-off-grid", "meter/weak-on-downbeat"]);
    }

    #[test]
    fn straddle_makes_one_measure_long_and_the_next_short() {
        // "b" is a whole note starting at beat 2: measure 1 totals 6 beats
        // and crosses the barline, leaving measure 2 with only 2.
        let song = song("4 4", "a 1 (2)\nb 0 (1)\nc 0 (4)\nd 0 (4)\ne 1 (1)\n");
        let derived = derive(&song).unwrap();
        let findings = validate_meter(&derived.measures, song.timesig);
        let codes: Vec<&str> = findings.iter().map(|d| d.code).collect();
        assert!(codes.contains(&"meter/long-measure"), "{codes:?}");
        assert!(codes.contains(&"meter/barline-straddle"), "{codes:?}");
        assert!(codes.contains(&"meter/short-measure"), "{codes:?}");
    }

    #[test]
    fn code_two_in_triple_meter_is_flagged() {
        let song = song("3 4", "a 1 (4)\nb 2 (4)\nc 0 (4)\n");
        let derived = derive(&song).unwrap();
        let findings = validate_meter(&derived.measures, song.timesig);
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].code, "meter/second-strong-misplaced");
    }

    #[test]
    fn verse_break_pickup_reopens_a_partial_measure() {
        let song = song(
            "4 4",
            "a 1 (1)\n#\nb -0 (4)\nc 1 (2.5)\nd 0 (4)\n",
        );
        let derived = derive(&song).unwrap();
        assert!(derived
            .diagnostics
            .iter()
            .any(|d| d.code == "score/verse-pickup"));
        let m: Vec<(usize, bool)> = derived.measures.iter().map(|m| (m.index, m.pickup)).collect();
        assert_eq!(m, vec![(1, false), (2, true), (3, false)]);
        assert_eq!(derived.measures[1].total_beats, ratio(1, 1));
        assert_eq!(derived.measures[2].start, ratio(5, 1));
        assert!(validate_meter(&derived.measures, song.timesig).is_empty());
    }

    #[test]
    fn propagates_unsupported_denominator() {
        let song = song("4 8", "a 1 (4)\n");
        assert_eq!(derive(&song).unwrap_err(), BeatsError::UnsupportedDenominator(8));
    }
}
