//! Core library for the LRM (Lyrics-Rhythm Matching) toolkit.
//!
//! Parses the LRM song format, derives and validates the underlying music
//! score, annotates lyrics with syllable stress (CMU pronouncing dictionary)
//! and keyword flags (RAKE / YAKE), aligns both with beat classes, and
//! computes the matching metric suite over the resulting records.

pub mod diagnostics;
pub mod lrm;

pub use diagnostics::{Diagnostic, Severity};
pub mod score;
pub mod lexicon;
pub mod keywords;
pub mod text;
pub mod align;
pub mod metrics;

#[cfg(feature = "arbitrary")]
pub mod arbitrary;
