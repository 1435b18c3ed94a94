//! Yet Another Keyword Extractor.
//!
//! Every term gets five features — casing, sentence position, normalized
//! frequency, relatedness to context and sentence dispersion — combined into
//! a score where lower is more key. Candidate phrases may not start or end
//! with a stopword; interior stopwords are discounted by how predictable
//! they are next to their neighbours. Near-duplicate candidates are dropped
//! by Levenshtein similarity.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    distinct_unigrams, proportion_count, tokenize, ExtractError, Extractor, ExtractorParams,
    KeywordSet, Selection, Stoplist, Token,
};

/// Relatedness context window, in tokens on each side.
const WINDOW_SIZE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Casing {
    Lower,
    /// Capitalized mid-sentence (strictly: first upper, rest lower).
    Capitalized,
    Acronym,
}

#[derive(Debug, Default, Clone)]
struct TermContext {
    left: Vec<String>,
    right: Vec<String>,
}

#[derive(Debug, Default, Clone)]
struct TermStats {
    tf: f64,
    tf_upper: f64,
    tf_acronym: f64,
    sentence_indices: Vec<usize>,
    score: f64,
}

/// Per-term feature scores for a document; exposed so callers can inspect
/// how any term (stopwords included) ranks.
#[derive(Debug, Clone)]
pub struct YakeAnalysis {
    sentences: Vec<Vec<Token>>,
    stats: BTreeMap<String, TermStats>,
    follow: BTreeMap<(String, String), f64>,
}

impl YakeAnalysis {
    /// The raw term score S(t); lower means more key. Computed for every
    /// term, including stopwords.
    pub fn term_score(&self, term: &str) -> Option<f64> {
        self.stats.get(term).map(|s| s.score)
    }

    fn term_frequency(&self, term: &str) -> f64 {
        self.stats.get(term).map(|s| s.tf).unwrap_or(0.0)
    }
}

fn casing_of(raw: &str, sentence_initial: bool) -> Casing {
    let stripped = raw.trim_matches(|c: char| !c.is_alphanumeric());
    let mut chars = stripped.chars();
    let Some(first) = chars.next() else { return Casing::Lower };
    let rest: Vec<char> = chars.collect();
    if first.is_uppercase() && !rest.is_empty() && rest.iter().all(|c| c.is_uppercase()) {
        return Casing::Acronym;
    }
    if first.is_uppercase() && !sentence_initial && rest.iter().all(|c| c.is_lowercase()) {
        return Casing::Capitalized;
    }
    Casing::Lower
}

fn median(sorted: &[usize]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

/// Computes term features over a document.
pub fn analyze(lyrics: &str, stoplist: &Stoplist) -> Result<YakeAnalysis, ExtractError> {
    let sentences = tokenize(lyrics);
    if sentences.is_empty() {
        return Err(ExtractError::EmptyLyrics);
    }

    let mut stats: BTreeMap<String, TermStats> = BTreeMap::new();
    let mut contexts: BTreeMap<String, TermContext> = BTreeMap::new();
    let mut follow: BTreeMap<(String, String), f64> = BTreeMap::new();

    for (sentence_idx, sentence) in sentences.iter().enumerate() {
        let mut window: Vec<String> = Vec::new();
        for (token_idx, token) in sentence.iter().enumerate() {
            if token.term.is_empty() {
                window.clear();
                continue;
            }
            let entry = stats.entry(token.term.clone()).or_default();
            entry.tf += 1.0;
            match casing_of(&token.raw, token_idx == 0) {
                Casing::Acronym => entry.tf_acronym += 1.0,
                Casing::Capitalized => entry.tf_upper += 1.0,
                Casing::Lower => {}
            }
            entry.sentence_indices.push(sentence_idx);

            for left_term in &window {
                contexts.entry(token.term.clone()).or_default().left.push(left_term.clone());
                contexts.entry(left_term.clone()).or_default().right.push(token.term.clone());
                *follow.entry((left_term.clone(), token.term.clone())).or_insert(0.0) += 1.0;
            }
            if window.len() == WINDOW_SIZE {
                window.remove(0);
            }
            window.push(token.term.clone());
        }
    }

    let max_tf = stats.values().map(|s| s.tf).fold(0.0f64, f64::max);
    let non_stop_tfs: Vec<f64> = stats
        .iter()
        .filter(|(term, _)| !stoplist.contains(term))
        .map(|(_, s)| s.tf)
        .collect();
    let mean = if non_stop_tfs.is_empty() {
        0.0
    } else {
        non_stop_tfs.iter().sum::<f64>() / non_stop_tfs.len() as f64
    };
    let std = if non_stop_tfs.is_empty() {
        0.0
    } else {
        (non_stop_tfs.iter().map(|tf| (tf - mean).powi(2)).sum::<f64>() / non_stop_tfs.len() as f64)
            .sqrt()
    };
    let total_sentences = sentences.len() as f64;

    for (term, stat) in stats.iter_mut() {
        let casing = stat.tf_acronym.max(stat.tf_upper) / (1.0 + stat.tf.ln());

        let mut distinct_sentences: Vec<usize> = stat.sentence_indices.clone();
        distinct_sentences.dedup();
        let position = (3.0 + median(&distinct_sentences)).ln().ln();

        let frequency = if mean + std > 0.0 { stat.tf / (mean + std) } else { 0.0 };

        let context = contexts.get(term).cloned().unwrap_or_default();
        let side_ratio = |neighbours: &[String]| {
            if neighbours.is_empty() {
                0.0
            } else {
                let distinct: BTreeSet<&String> = neighbours.iter().collect();
                distinct.len() as f64 / neighbours.len() as f64
            }
        };
        let relatedness =
            1.0 + (side_ratio(&context.left) + side_ratio(&context.right)) * (stat.tf / max_tf);

        let dispersion = distinct_sentences.len() as f64 / total_sentences;

        stat.score = (relatedness * position)
            / (casing + frequency / relatedness + dispersion / relatedness);
    }

    Ok(YakeAnalysis { sentences, stats, follow })
}

/// Runs YAKE over one lyric document.
pub fn yake_extract(
    lyrics: &str,
    stoplist: &Stoplist,
    params: &ExtractorParams,
) -> Result<KeywordSet, ExtractError> {
    let analysis = analyze(lyrics, stoplist)?;

    // Candidate n-grams with their occurrence counts.
    let mut candidates: BTreeMap<Vec<String>, f64> = BTreeMap::new();
    for sentence in &analysis.sentences {
        let terms: Vec<&str> = sentence.iter().map(|t| t.term.as_str()).collect();
        for start in 0..terms.len() {
            for len in 1..=params.max_ngram.max(1) {
                let Some(slice) = terms.get(start..start + len) else { break };
                if slice.iter().any(|t| t.is_empty()) {
                    break;
                }
                if stoplist.contains(slice[0]) || stoplist.contains(slice[len - 1]) {
                    continue;
                }
                let key: Vec<String> = slice.iter().map(|t| t.to_string()).collect();
                *candidates.entry(key).or_insert(0.0) += 1.0;
            }
        }
    }

    let mut scored: BTreeMap<String, f64> = BTreeMap::new();
    for (terms, occurrences) in &candidates {
        let mut prod = 1.0f64;
        let mut sum = 0.0f64;
        for (j, term) in terms.iter().enumerate() {
            if stoplist.contains(term) {
                let prob_prev = match j.checked_sub(1).and_then(|i| terms.get(i)) {
                    Some(prev) => {
                        analysis.follow.get(&(prev.clone(), term.clone())).copied().unwrap_or(0.0)
                            / analysis.term_frequency(prev)
                    }
                    None => 0.0,
                };
                let prob_succ = match terms.get(j + 1) {
                    Some(next) => {
                        analysis.follow.get(&(term.clone(), next.clone())).copied().unwrap_or(0.0)
                            / analysis.term_frequency(next)
                    }
                    None => 0.0,
                };
                let prob = prob_prev * prob_succ;
                prod *= 1.0 + (1.0 - prob);
                sum -= 1.0 - prob;
            } else {
                let score = analysis.term_score(term).expect("candidate terms are in stats");
                prod *= score;
                sum += score;
            }
        }
        if sum == -1.0 {
            sum = 0.999_999_999;
        }
        let score = prod / (occurrences * (1.0 + sum));
        scored.insert(terms.join(" "), score);
    }

    // Best first: score ascending, ties lexicographic.
    let mut ranked: Vec<(&String, f64)> = scored.iter().map(|(t, &s)| (t, s)).collect();
    ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(b.0)));

    let limit = match params.selection {
        Selection::TopK(k) => Some(k),
        Selection::Proportion(p) => {
            Some(proportion_count(p, distinct_unigrams(&analysis.sentences, stoplist).len()))
        }
        Selection::ScoreThreshold(_) => None,
    };

    let mut taken: Vec<&String> = Vec::new();
    for (term, score) in &ranked {
        if let Some(limit) = limit {
            if taken.len() >= limit {
                break;
            }
        }
        if let Selection::ScoreThreshold(threshold) = params.selection {
            if *score > threshold {
                break;
            }
        }
        if taken.iter().any(|kept| similarity(kept, term) >= params.dedup_threshold) {
            continue;
        }
        taken.push(term);
    }

    let selected: BTreeSet<String> = taken
        .iter()
        .flat_map(|term| term.split(' '))
        .map(str::to_string)
        .collect();

    Ok(KeywordSet {
        extractor: Extractor::Yake,
        scored,
        selected,
        params: params.clone(),
    })
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut prev = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = if ca == cb { prev } else { prev + 1 };
            prev = row[j + 1];
            row[j + 1] = cost.min(row[j] + 1).min(row[j + 1] + 1);
        }
    }
    row[b.len()]
}

/// Levenshtein similarity in [0, 1]; equal strings score 1.
fn similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_word_is_the_sole_candidate() {
        let stoplist = Stoplist::bundled();
        let kws = yake_extract("la la la la", &stoplist, &ExtractorParams::default()).unwrap();
        assert_eq!(kws.scored.len(), 1);
        // Hand-computed: S = (5/3 * ln(ln 3)) / (2 * 3/5) ~= 0.1306216,
        // candidate score = S / (4 * (1 + S)).
        let score = kws.scored["la"];
        assert!((score - 0.028_882_6).abs() < 1e-6, "score {score}");
        // Proportion(0.5) of one distinct unigram rounds up to one term.
        assert_eq!(kws.selected.iter().collect::<Vec<_>>(), vec!["la"]);
    }

    #[test]
    fn empty_lyrics_are_an_error() {
        let stoplist = Stoplist::bundled();
        assert!(matches!(
            yake_extract("", &stoplist, &ExtractorParams::default()),
            Err(ExtractError::EmptyLyrics)
        ));
        assert!(matches!(
            yake_extract(" \n\t", &stoplist, &ExtractorParams::default()),
            Err(ExtractError::EmptyLyrics)
        ));
    }

    #[test]
    fn content_word_outranks_a_function_word() {
        let stoplist = Stoplist::bundled();
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/lyrics/red_river_valley_verse.txt"
        ))
        .unwrap();
        let analysis = analyze(&text, &stoplist).unwrap();
        let valley = analysis.term_score("valley").unwrap();
        let the = analysis.term_score("the").unwrap();
        assert!(
            valley < the,
            "lower is better: valley {valley} should beat the {the}"
        );
    }

    #[test]
    fn stopwords_never_enter_the_candidate_set() {
        let stoplist = Stoplist::bundled();
        let kws = yake_extract(
            "the valley the valley",
            &stoplist,
            &ExtractorParams { selection: Selection::TopK(10), ..Default::default() },
        )
        .unwrap();
        assert!(kws.scored.contains_key("valley"));
        assert!(!kws.scored.contains_key("the"));
    }

    #[test]
    fn ngram_candidates_respect_boundaries() {
        let stoplist = Stoplist::bundled();
        let kws = yake_extract(
            "red river valley",
            &stoplist,
            &ExtractorParams {
                max_ngram: 3,
                selection: Selection::TopK(1),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(kws.scored.contains_key("red river valley"));
        assert!(kws.scored.contains_key("red river"));
        assert!(kws.scored.contains_key("red"));
    }

    #[test]
    fn dedup_drops_near_duplicates() {
        assert_eq!(levenshtein("smile", "smiles"), 1);
        assert!(similarity("smile", "smiles") > 0.8);
        assert_eq!(similarity("a", "a"), 1.0);

        let stoplist = Stoplist::bundled();
        let kws = yake_extract(
            "smile smiles valley",
            &stoplist,
            &ExtractorParams {
                selection: Selection::TopK(3),
                dedup_threshold: 0.8,
                ..Default::default()
            },
        )
        .unwrap();
        // "smile" and "smiles" are 0.833-similar; only one survives.
        let has_smile = kws.selected.contains("smile");
        let has_smiles = kws.selected.contains("smiles");
        assert!(has_smile ^ has_smiles, "selected: {:?}", kws.selected);
        assert!(kws.selected.contains("valley"));
    }

    #[test]
    fn determinism_is_bit_for_bit() {
        let stoplist = Stoplist::bundled();
        let text = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../fixtures/lyrics/red_river_valley_verse.txt"
        ))
        .unwrap();
        let p = ExtractorParams::default();
        let a = yake_extract(&text, &stoplist, &p).unwrap();
        let b = yake_extract(&text, &stoplist, &p).unwrap();
        assert_eq!(a, b);
    }
}
