//! Pronunciation lexicon: CMU dictionary ingestion and syllable stress.
//!
//! Dictionary lines look like `VALLEY  V AE1 L IY0`; alternate pronunciations
//! carry a `(n)` suffix on the word and comment lines start with `;;;`.
//! A vowel phoneme ends in a stress digit, and the digits define both the
//! syllable count and the stress pattern: 1 is stressed, 0 unstressed, and 2
//! (secondary stress) is folded into unstressed.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::diagnostics::Diagnostic;
use crate::lrm::{Song, WordEntry};

/// Bundled mini-lexicon covering the sample songs; pass a full CMU
/// dictionary file for real corpora.
pub const BUNDLED_LEXICON: &str = include_str!("../data/cmudict.subset");

/// One phoneme; vowels carry their stress digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phoneme {
    pub symbol: String,
    pub stress: Option<u8>,
}

/// An ordered pronunciation, e.g. `V AE1 L IY0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pronunciation {
    pub phonemes: Vec<Phoneme>,
}

impl Pronunciation {
    /// Stress digits of the vowel phonemes, in order. Their count is the
    /// syllable count.
    pub fn stress_digits(&self) -> Vec<u8> {
        self.phonemes.iter().filter_map(|p| p.stress).collect()
    }

    pub fn syllable_count(&self) -> usize {
        self.phonemes.iter().filter(|p| p.stress.is_some()).count()
    }
}

/// Case-insensitive word → pronunciations map.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<Pronunciation>>,
    /// First comment line of the source file, as a version fingerprint.
    pub version: String,
}

/// A loaded lexicon along with per-line findings.
#[derive(Debug, Clone)]
pub struct LexiconLoad {
    pub lexicon: Lexicon,
    pub diagnostics: Vec<Diagnostic>,
}

/// Loads a CMU-format dictionary. Malformed lines are skipped and reported.
pub fn load_lexicon(source: &str) -> LexiconLoad {
    let mut entries: BTreeMap<String, Vec<Pronunciation>> = BTreeMap::new();
    let mut diagnostics = Vec::new();
    let mut version = String::from("unknown");
    let mut seen_header = false;

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx as u32 + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix(";;;") {
            if !seen_header {
                let comment = comment.trim();
                if !comment.is_empty() {
                    version = comment.to_string();
                    seen_header = true;
                }
            }
            continue;
        }
        let mut fields = line.split_whitespace();
        let head = fields.next().expect("non-empty line has a first field");
        let word = match head.split_once('(') {
            None => head,
            Some((base, variant)) if variant.ends_with(')') => {
                let digits = &variant[..variant.len() - 1];
                if digits.chars().all(|c| c.is_ascii_digit()) && !digits.is_empty() {
                    base
                } else {
                    diagnostics.push(
                        Diagnostic::warning(
                            "lexicon/malformed-line",
                            format!("bad variant marker in {head:?}"),
                        )
                        .on_line(line_no),
                    );
                    continue;
                }
            }
            Some(_) => {
                diagnostics.push(
                    Diagnostic::warning(
                        "lexicon/malformed-line",
                        format!("bad variant marker in {head:?}"),
                    )
                    .on_line(line_no),
                );
                continue;
            }
        };

        let mut phonemes = Vec::new();
        let mut ok = true;
        for field in fields {
            match parse_phoneme(field) {
                Some(phoneme) => phonemes.push(phoneme),
                None => {
                    diagnostics.push(
                        Diagnostic::warning(
                            "lexicon/malformed-line",
                            format!("bad phoneme {field:?} for {word:?}"),
                        )
                        .on_line(line_no),
                    );
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if phonemes.is_empty() {
            diagnostics.push(
                Diagnostic::warning(
                    "lexicon/malformed-line",
                    format!("no phonemes for {word:?}"),
                )
                .on_line(line_no),
            );
            continue;
        }
        let pronunciation = Pronunciation { phonemes };
        if pronunciation.syllable_count() == 0 {
            diagnostics.push(
                Diagnostic::warning(
                    "lexicon/malformed-line",
                    format!("no vowel phoneme for {word:?}"),
                )
                .on_line(line_no),
            );
            continue;
        }
        entries.entry(word.to_lowercase()).or_default().push(pronunciation);
    }

    LexiconLoad {
        lexicon: Lexicon { entries, version },
        diagnostics,
    }
}

fn parse_phoneme(field: &str) -> Option<Phoneme> {
    let (symbol, stress) = match field.chars().last() {
        Some(last) if last.is_ascii_digit() => {
            let digit = last.to_digit(10).unwrap() as u8;
            if digit > 2 {
                return None;
            }
            (&field[..field.len() - 1], Some(digit))
        }
        Some(_) => (field, None),
        None => return None,
    };
    if symbol.is_empty() || !symbol.chars().all(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    Some(Phoneme { symbol: symbol.to_string(), stress })
}

impl Lexicon {
    pub fn bundled() -> Lexicon {
        load_lexicon(BUNDLED_LEXICON).lexicon
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All pronunciations of a word, case-insensitive, first listed first.
    pub fn lookup(&self, word: &str) -> Option<&[Pronunciation]> {
        self.entries.get(&word.to_lowercase()).map(Vec::as_slice)
    }
}

/// Maps a CMU stress digit to a binary stressed flag: 1 is stressed, 0 is
/// unstressed, and secondary stress (2) counts as unstressed.
pub fn stress_label(digit: u8) -> bool {
    digit == 1
}

/// Where a syllable annotation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationSource {
    Lexicon,
    Fallback,
}

/// One syllable: a cosmetic surface fragment plus the contractual stress flag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Syllable {
    pub fragment: String,
    pub stressed: bool,
}

/// Per-word syllable/stress annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SyllableAnnotation {
    pub word: String,
    pub syllables: Vec<Syllable>,
    pub source: AnnotationSource,
}

impl SyllableAnnotation {
    pub fn stress_flags(&self) -> Vec<bool> {
        self.syllables.iter().map(|s| s.stressed).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("word {0:?} is empty after stripping edge punctuation")]
    EmptyWord(String),
}

use crate::text::normalize_token;

/// Splits a word into syllables with stress flags.
///
/// Uses the first listed pronunciation; out-of-vocabulary words fall back to
/// vowel-group counting (first syllable stressed) and are marked as such.
/// Words ending in an apostrophe suffix (`'s`, `'d`, ...) retry on the base
/// word before falling back.
pub fn syllabify(word: &str, lexicon: &Lexicon) -> Result<SyllableAnnotation, LexiconError> {
    let normalized = normalize_token(word);
    if normalized.is_empty() {
        return Err(LexiconError::EmptyWord(word.to_string()));
    }

    let looked_up = lexicon.lookup(&normalized).or_else(|| {
        normalized
            .rsplit_once('\'')
            .and_then(|(base, _suffix)| lexicon.lookup(base))
    });

    if let Some(pronunciations) = looked_up {
        let digits = pronunciations[0].stress_digits();
        let flags: Vec<bool> = digits.iter().map(|&d| stress_label(d)).collect();
        let fragments = split_fragments(&normalized, flags.len());
        let syllables = fragments
            .into_iter()
            .zip(&flags)
            .map(|(fragment, &stressed)| Syllable { fragment, stressed })
            .collect();
        return Ok(SyllableAnnotation {
            word: word.to_string(),
            syllables,
            source: AnnotationSource::Lexicon,
        });
    }

    let count = fallback_syllable_count(&normalized);
    let fragments = split_fragments(&normalized, count);
    let syllables = fragments
        .into_iter()
        .enumerate()
        .map(|(i, fragment)| Syllable { fragment, stressed: i == 0 })
        .collect();
    Ok(SyllableAnnotation {
        word: word.to_string(),
        syllables,
        source: AnnotationSource::Fallback,
    })
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Maximal vowel runs of the normalized spelling, as (start, end) byte ranges.
fn vowel_groups(word: &str) -> Vec<(usize, usize)> {
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut open = false;
    for (idx, c) in word.char_indices() {
        if is_vowel(c.to_ascii_lowercase()) {
            if open {
                groups.last_mut().unwrap().1 = idx + c.len_utf8();
            } else {
                groups.push((idx, idx + c.len_utf8()));
                open = true;
            }
        } else {
            open = false;
        }
    }
    groups
}

/// Out-of-vocabulary oracle: vowel groups, with a silent final `e` dropped
/// when the word has more than one group. Never returns zero.
pub fn fallback_syllable_count(word: &str) -> usize {
    let groups = vowel_groups(word);
    if groups.len() > 1 {
        let (start, end) = *groups.last().unwrap();
        if end == word.len() && &word[start..end] == "e" {
            return groups.len() - 1;
        }
    }
    groups.len().max(1)
}

/// Splits a spelling into `count` display fragments, one vowel region per
/// fragment where possible. Fragments are cosmetic; counts and stress flags
/// carry the contract.
fn split_fragments(word: &str, count: usize) -> Vec<String> {
    if count <= 1 {
        return vec![word.to_string()];
    }
    let mut groups = vowel_groups(word);

    // Too few vowel runs (e.g. "going" has one): split runs letter-wise.
    while groups.len() < count {
        let Some(pos) = groups.iter().position(|(s, e)| {
            word[*s..*e].chars().count() > 1
        }) else {
            break;
        };
        let (start, end) = groups[pos];
        let first_len = word[start..end].chars().next().unwrap().len_utf8();
        groups[pos] = (start, start + first_len);
        groups.insert(pos + 1, (start + first_len, end));
    }
    // Too many runs (e.g. silent-e spellings): merge from the end.
    while groups.len() > count {
        let last = groups.pop().unwrap();
        groups.last_mut().unwrap().1 = last.1;
    }

    if groups.len() < count {
        // Not enough vowels at all; fall back to even character chunks.
        return even_chunks(word, count);
    }

    // Cut in the middle of each consonant run between vowel regions.
    let mut cuts = Vec::with_capacity(count - 1);
    for pair in groups.windows(2) {
        let (prev_end, next_start) = (pair[0].1, pair[1].0);
        let consonants: Vec<usize> = word[prev_end..next_start]
            .char_indices()
            .map(|(i, _)| prev_end + i)
            .collect();
        let cut = if consonants.is_empty() {
            next_start
        } else {
            consonants[consonants.len() / 2]
        };
        cuts.push(cut);
    }
    let mut fragments = Vec::with_capacity(count);
    let mut start = 0;
    for cut in cuts {
        fragments.push(word[start..cut].to_string());
        start = cut;
    }
    fragments.push(word[start..].to_string());
    fragments
}

fn even_chunks(word: &str, count: usize) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let per = chars.len().div_ceil(count);
    let mut fragments: Vec<String> = chars
        .chunks(per.max(1))
        .map(|chunk| chunk.iter().collect())
        .collect();
    while fragments.len() < count {
        fragments.push(String::new());
    }
    fragments.truncate(count);
    fragments
}

/// Song-level annotation, reconciled against the file's group counts: the
/// LRM group count wins, stress flags are truncated or padded (unstressed)
/// to match, and each adjustment is reported.
pub fn annotate_song(
    song: &Song,
    lexicon: &Lexicon,
) -> (Vec<SyllableAnnotation>, Vec<Diagnostic>) {
    let mut annotations = Vec::with_capacity(song.word_count());
    let mut diagnostics = Vec::new();
    for entry in song.words() {
        let annotation = reconcile_word(entry, lexicon, &mut diagnostics);
        annotations.push(annotation);
    }
    (annotations, diagnostics)
}

fn reconcile_word(
    entry: &WordEntry,
    lexicon: &Lexicon,
    diagnostics: &mut Vec<Diagnostic>,
) -> SyllableAnnotation {
    let groups = entry.groups.len();
    let mut annotation = match syllabify(&entry.text, lexicon) {
        Ok(annotation) => annotation,
        Err(LexiconError::EmptyWord(_)) => {
            diagnostics.push(Diagnostic::warning(
                "lexicon/unpronounceable",
                format!("word {:?} has no letters; treating all syllables as unstressed", entry.text),
            ));
            SyllableAnnotation {
                word: entry.text.clone(),
                syllables: vec![],
                source: AnnotationSource::Fallback,
            }
        }
    };
    if annotation.source == AnnotationSource::Fallback && !annotation.syllables.is_empty() {
        diagnostics.push(Diagnostic::info(
            "lexicon/oov",
            format!("word {:?} not in the lexicon; vowel-group fallback applied", entry.text),
        ));
    } else if annotation.source == AnnotationSource::Lexicon {
        let normalized = normalize_token(&entry.text);
        if normalized.contains('\'') && lexicon.lookup(&normalized).is_none() {
            diagnostics.push(Diagnostic::info(
                "lexicon/apostrophe-suffix",
                format!(
                    "word {:?} pronounced from its base form (apostrophe suffix stripped)",
                    entry.text
                ),
            ));
        }
    }
    if annotation.syllables.len() != groups {
        diagnostics.push(Diagnostic::warning(
            "lexicon/syllable-count-mismatch",
            format!(
                "word {:?}: lexicon gives {} syllable(s) but the file writes {} group(s); \
                 the file wins",
                entry.text,
                annotation.syllables.len(),
                groups
            ),
        ));
        annotation.syllables.truncate(groups);
        while annotation.syllables.len() < groups {
            // Padding syllables are unstressed and reuse the word as fragment.
            annotation.syllables.push(Syllable {
                fragment: normalize_token(&entry.text),
                stressed: false,
            });
        }
    }
    annotation
}
