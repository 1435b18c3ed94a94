//! Rapid Automatic Keyword Extraction.
//!
//! Candidate phrases are the maximal stopword-free runs inside each
//! sentence. Every run feeds a word co-occurrence graph; a word scores
//! deg(w)/freq(w), where deg counts co-occurrences within runs (the word
//! itself included), and a phrase scores the sum of its member word scores.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    distinct_unigrams, proportion_count, tokenize, ExtractError, Extractor, ExtractorParams,
    KeywordSet, Selection, Stoplist,
};

/// Runs RAKE over one lyric document.
pub fn rake_extract(
    lyrics: &str,
    stoplist: &Stoplist,
    params: &ExtractorParams,
) -> Result<KeywordSet, ExtractError> {
    let sentences = tokenize(lyrics);
    if sentences.is_empty() {
        return Err(ExtractError::EmptyLyrics);
    }

    let mut runs: Vec<Vec<String>> = Vec::new();
    for sentence in &sentences {
        let mut run: Vec<String> = Vec::new();
        for token in sentence {
            if token.term.is_empty() || stoplist.contains(&token.term) {
                if !run.is_empty() {
                    runs.push(std::mem::take(&mut run));
                }
            } else {
                run.push(token.term.clone());
            }
        }
        if !run.is_empty() {
            runs.push(run);
        }
    }

    let mut freq: BTreeMap<&str, f64> = BTreeMap::new();
    let mut degree: BTreeMap<&str, f64> = BTreeMap::new();
    for run in &runs {
        for word in run {
            *freq.entry(word).or_insert(0.0) += 1.0;
            *degree.entry(word).or_insert(0.0) += run.len() as f64;
        }
    }
    let word_score = |word: &str| degree[word] / freq[word];

    let mut scored: BTreeMap<String, f64> = BTreeMap::new();
    if params.max_ngram <= 1 {
        for word in freq.keys() {
            scored.insert(word.to_string(), word_score(word));
        }
    } else {
        for run in &runs {
            if run.len() > params.max_ngram {
                continue;
            }
            let score = run.iter().map(|w| word_score(w)).sum();
            scored.insert(run.join(" "), score);
        }
    }

    // Best first: score descending, ties lexicographic.
    let mut ranked: Vec<(&String, f64)> = scored.iter().map(|(t, &s)| (t, s)).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(b.0)));

    let chosen: Vec<&String> = match params.selection {
        Selection::TopK(k) => ranked.iter().take(k).map(|(t, _)| *t).collect(),
        Selection::Proportion(p) => {
            let n = proportion_count(p, distinct_unigrams(&sentences, stoplist).len());
            ranked.iter().take(n).map(|(t, _)| *t).collect()
        }
        Selection::ScoreThreshold(t) => {
            ranked.iter().filter(|(_, s)| *s >= t).map(|(t, _)| *t).collect()
        }
    };

    let selected: BTreeSet<String> = chosen
        .iter()
        .flat_map(|term| term.split(' '))
        .map(str::to_string)
        .collect();

    Ok(KeywordSet {
        extractor: Extractor::Rake,
        scored,
        selected,
        params: params.clone(),
    })
}
