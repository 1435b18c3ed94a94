//! The matching metric suite: confusion tallies, Accuracy, SM, NM, the
//! LRM score, conditional probabilities, distributions and least-squares
//! fits.
//!
//! Every ratio is computed from exact integer counts with a single final
//! division; zero denominators are typed errors, never NaN.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::align::LLERecord;

/// An exact metric value: a ratio of record counts.
pub type Fraction = Ratio<u64>;

/// Converts an exact metric to a float for display or serialization.
pub fn fraction_to_f64(value: Fraction) -> f64 {
    value.to_f64().expect("count ratios fit in f64")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("confusion matrix has no records")]
    EmptyCounts,
    #[error("no stressed records: SM is undefined")]
    NoStressedRecords,
    #[error("zero denominator: NM is undefined")]
    NoDenominator,
    #[error("records mix word and syllable kinds")]
    MixedKinds,
    #[error("conditioning event has zero count")]
    ZeroConditionCount,
    #[error("no records to summarize")]
    EmptyRecords,
    #[error("regression is undefined: {0}")]
    DegenerateX(String),
}

/// Which beat field plays the "strong" role in a tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeatScope {
    /// Strong beats (codes 1 and 2) versus weak beats.
    StrongVsWeak,
    /// Downbeats (code 1) versus everything else.
    DownbeatVsRest,
}

impl BeatScope {
    fn strong(self, record: &LLERecord) -> bool {
        match self {
            BeatScope::StrongVsWeak => record.beat_strong,
            BeatScope::DownbeatVsRest => record.is_downbeat,
        }
    }
}

/// The 2x2 tally of stressed/unstressed elements on strong/weak beats:
/// SSB (TP), SWB (FN), USB (FP), UWB (TN).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub ssb: u64,
    pub swb: u64,
    pub usb: u64,
    pub uwb: u64,
}

/// Which printed formula Nonstress Matching follows. The composition form
/// UWB/(USB+UWB) reads NM as "the share of unstressed records that land on
/// weak beats"; the paper form UWB/(SWB+UWB) is the one the reference
/// metric tables are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmFormula {
    Composition,
    PaperFormula,
}

impl Default for NmFormula {
    fn default() -> Self {
        NmFormula::Composition
    }
}

impl std::fmt::Display for NmFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NmFormula::Composition => write!(f, "composition"),
            NmFormula::PaperFormula => write!(f, "paper_formula"),
        }
    }
}

impl ConfusionCounts {
    pub fn new(ssb: u64, swb: u64, usb: u64, uwb: u64) -> Self {
        ConfusionCounts { ssb, swb, usb, uwb }
    }

    pub fn total(&self) -> u64 {
        self.ssb + self.swb + self.usb + self.uwb
    }

    /// Cell-wise sum; associative and commutative, so per-song tallies can
    /// be reduced in any grouping.
    pub fn merge(&self, other: &ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            ssb: self.ssb + other.ssb,
            swb: self.swb + other.swb,
            usb: self.usb + other.usb,
            uwb: self.uwb + other.uwb,
        }
    }

    /// (SSB + UWB) / total.
    pub fn accuracy(&self) -> Result<Fraction, MetricsError> {
        match self.total() {
            0 => Err(MetricsError::EmptyCounts),
            total => Ok(Fraction::new(self.ssb + self.uwb, total)),
        }
    }

    /// Stress Matching (sensitivity): SSB / (SSB + SWB).
    pub fn stress_matching(&self) -> Result<Fraction, MetricsError> {
        match self.ssb + self.swb {
            0 => Err(MetricsError::NoStressedRecords),
            stressed => Ok(Fraction::new(self.ssb, stressed)),
        }
    }

    /// Nonstress Matching under the chosen formula.
    pub fn nonstress_matching(&self, formula: NmFormula) -> Result<Fraction, MetricsError> {
        let denominator = match formula {
            NmFormula::Composition => self.usb + self.uwb,
            NmFormula::PaperFormula => self.swb + self.uwb,
        };
        match denominator {
            0 => Err(MetricsError::NoDenominator),
            d => Ok(Fraction::new(self.uwb, d)),
        }
    }

    /// Harmonic mean of SM and NM, exactly.
    pub fn lrm_score(&self, formula: NmFormula) -> Result<Fraction, MetricsError> {
        Ok(lrm_score_exact(
            self.stress_matching()?,
            self.nonstress_matching(formula)?,
        ))
    }
}

/// Tallies single-kind records into the 2x2 matrix.
pub fn confusion(records: &[LLERecord], scope: BeatScope) -> Result<ConfusionCounts, MetricsError> {
    let mut kinds = records.iter().map(|r| r.kind);
    if let Some(first) = kinds.next() {
        if kinds.any(|k| k != first) {
            return Err(MetricsError::MixedKinds);
        }
    }
    let mut counts = ConfusionCounts::default();
    for record in records {
        match (record.stressed, scope.strong(record)) {
            (true, true) => counts.ssb += 1,
            (true, false) => counts.swb += 1,
            (false, true) => counts.usb += 1,
            (false, false) => counts.uwb += 1,
        }
    }
    Ok(counts)
}

/// Harmonic mean of two non-negative reals; 0 when both are 0. Equal
/// arguments return exactly that value.
pub fn lrm_score(sm: f64, nm: f64) -> f64 {
    if sm == nm {
        return sm;
    }
    let sum = sm + nm;
    if sum == 0.0 {
        0.0
    } else {
        2.0 * sm * nm / sum
    }
}

/// Exact harmonic mean of two count ratios; 0 when both are 0.
pub fn lrm_score_exact(sm: Fraction, nm: Fraction) -> Fraction {
    let sum = sm + nm;
    if sum == Fraction::from_integer(0) {
        return Fraction::from_integer(0);
    }
    Fraction::from_integer(2) * sm * nm / sum
}

/// P(A | B) = count(A and B) / count(B), from exact counts.
pub fn conditional_probability<A, B>(
    records: &[LLERecord],
    event_a: A,
    event_b: B,
) -> Result<Fraction, MetricsError>
where
    A: Fn(&LLERecord) -> bool,
    B: Fn(&LLERecord) -> bool,
{
    let count_b = records.iter().filter(|r| event_b(r)).count() as u64;
    if count_b == 0 {
        return Err(MetricsError::ZeroConditionCount);
    }
    let count_ab = records.iter().filter(|r| event_a(r) && event_b(r)).count() as u64;
    Ok(Fraction::new(count_ab, count_b))
}

/// Proportion summaries in both directions: where each lyrical class lands
/// (given the LLE) and what each beat class is made of (given the beat).
/// `None` marks an empty conditioning class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub counts: ConfusionCounts,
    /// Share of stressed records overall.
    pub stressed_share: Fraction,
    pub stressed_on_strong: Option<Fraction>,
    pub stressed_on_weak: Option<Fraction>,
    pub unstressed_on_strong: Option<Fraction>,
    pub unstressed_on_weak: Option<Fraction>,
    pub strong_from_stressed: Option<Fraction>,
    pub strong_from_unstressed: Option<Fraction>,
    pub weak_from_stressed: Option<Fraction>,
    pub weak_from_unstressed: Option<Fraction>,
}

/// Summarizes single-kind records into both distribution directions.
pub fn distribution(records: &[LLERecord]) -> Result<Distribution, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecords);
    }
    let counts = confusion(records, BeatScope::StrongVsWeak)?;
    let share = |numerator: u64, denominator: u64| {
        (denominator > 0).then(|| Fraction::new(numerator, denominator))
    };
    let stressed = counts.ssb + counts.swb;
    let unstressed = counts.usb + counts.uwb;
    let strong = counts.ssb + counts.usb;
    let weak = counts.swb + counts.uwb;
    Ok(Distribution {
        counts,
        stressed_share: Fraction::new(stressed, counts.total()),
        stressed_on_strong: share(counts.ssb, stressed),
        stressed_on_weak: share(counts.swb, stressed),
        unstressed_on_strong: share(counts.usb, unstressed),
        unstressed_on_weak: share(counts.uwb, unstressed),
        strong_from_stressed: share(counts.ssb, strong),
        strong_from_unstressed: share(counts.usb, strong),
        weak_from_stressed: share(counts.swb, weak),
        weak_from_unstressed: share(counts.uwb, weak),
    })
}

/// Ordinary least squares fit of y on x with the Pearson correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
    pub n: usize,
}

/// Closed-form simple linear regression. Needs two or more points and
/// x variance; a flat y series yields r = 0.
pub fn ols_fit(points: &[(f64, f64)]) -> Result<RegressionFit, MetricsError> {
    let n = points.len();
    if n < 2 {
        return Err(MetricsError::DegenerateX(format!("{n} point(s), need at least 2")));
    }
    let nf = n as f64;
    let sum_x: f64 = points.iter().map(|p| p.0).sum();
    let sum_y: f64 = points.iter().map(|p| p.1).sum();
    let mean_x = sum_x / nf;
    let mean_y = sum_y / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(MetricsError::DegenerateX("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r = if syy == 0.0 {
        0.0
    } else {
        (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
    };
    Ok(RegressionFit { slope, intercept, r, n })
}

/// Convenience predicates for the conditional probability panels.
pub mod events {
    use super::LLERecord;

    pub fn stressed(r: &LLERecord) -> bool {
        r.stressed
    }
    pub fn unstressed(r: &LLERecord) -> bool {
        !r.stressed
    }
    pub fn strong(r: &LLERecord) -> bool {
        r.beat_strong
    }
    pub fn weak(r: &LLERecord) -> bool {
        !r.beat_strong
    }
    pub fn downbeat(r: &LLERecord) -> bool {
        r.is_downbeat
    }
    pub fn stressed_on_weak(r: &LLERecord) -> bool {
        r.stressed && !r.beat_strong
    }
}

/// Per-song regression points: x = weak-beat record count, y = stressed
/// records on weak beats, over single-kind records grouped by song id.
pub fn weak_beat_points(records: &[LLERecord]) -> Vec<(String, u64, u64)> {
    let mut by_song: std::collections::BTreeMap<&str, (u64, u64)> = std::collections::BTreeMap::new();
    for record in records {
        let entry = by_song.entry(record.song.as_str()).or_default();
        if !record.beat_strong {
            entry.0 += 1;
            if record.stressed {
                entry.1 += 1;
            }
        } else {
            by_song.entry(record.song.as_str()).or_default();
        }
    }
    by_song
        .into_iter()
        .map(|(song, (x, y))| (song.to_string(), x, y))
        .collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::LleKind;
    use crate::lrm::TimeSignature;

    fn record(kind: LleKind, stressed: bool, strong: bool, downbeat: bool) -> LLERecord {
        LLERecord {
            song: "s".into(),
            timesig: TimeSignature::new(4, 4),
            kind,
            token: "t".into(),
            stressed,
            beat_strong: strong,
            is_downbeat: downbeat,
            pickup: false,
            extractor: None,
        }
    }

    /// The published word-level flags and beats of the fixture excerpt.
    fn fixture_word_records() -> Vec<LLERecord> {
        // (keyword, beat code) per word, in file order.
        let rows: [(bool, u8); 17] = [
            (false, 0), // from
            (false, 0), // this
            (true, 1),  // valley
            (false, 0), // they
            (true, 1),  // say
            (false, 2), // you
            (false, 0), // are
            (true, 1),  // going
            (false, 0), // we
            (false, 0), // shall
            (true, 1),  // miss
            (false, 2), // your
            (true, 0),  // bright
            (true, 1),  // eyes
            (false, 2), // and
            (true, 0),  // sweet
            (true, 1),  // smile
        ];
        rows.iter()
            .map(|&(kw, beat)| record(LleKind::Word, kw, beat != 0, beat == 1))
            .collect()
    }

    #[test]
    fn fixture_word_confusion_matches_the_hand_count() {
        let counts = confusion(&fixture_word_records(), BeatScope::StrongVsWeak).unwrap();
        assert_eq!(counts, ConfusionCounts::new(6, 2, 3, 6));
        assert_eq!(counts.accuracy().unwrap(), Fraction::new(12, 17));
        assert_eq!(counts.stress_matching().unwrap(), Fraction::new(3, 4));
        assert_eq!(
            counts.nonstress_matching(NmFormula::PaperFormula).unwrap(),
            Fraction::new(3, 4)
        );
        assert_eq!(
            counts.nonstress_matching(NmFormula::Composition).unwrap(),
            Fraction::new(2, 3)
        );
        assert_eq!(
            counts.lrm_score(NmFormula::PaperFormula).unwrap(),
            Fraction::new(3, 4)
        );
    }

    #[test]
    fn empty_records_tally_to_zero() {
        let counts = confusion(&[], BeatScope::StrongVsWeak).unwrap();
        assert_eq!(counts, ConfusionCounts::default());
        assert_eq!(counts.accuracy(), Err(MetricsError::EmptyCounts));
    }

    #[test]
    fn mixed_kinds_are_rejected() {
        let records = vec![
            record(LleKind::Word, true, true, true),
            record(LleKind::Syllable, true, true, true),
        ];
        assert_eq!(
            confusion(&records, BeatScope::StrongVsWeak),
            Err(MetricsError::MixedKinds)
        );
    }

    #[test]
    fn downbeat_scope_narrows_strong() {
        let records = vec![
            record(LleKind::Word, true, true, true),
            record(LleKind::Word, true, true, false), // strong but not a downbeat
        ];
        let strong = confusion(&records, BeatScope::StrongVsWeak).unwrap();
        assert_eq!((strong.ssb, strong.swb), (2, 0));
        let downbeat = confusion(&records, BeatScope::DownbeatVsRest).unwrap();
        assert_eq!((downbeat.ssb, downbeat.swb), (1, 1));
    }

    #[test]
    fn degenerate_metric_inputs_are_typed_errors() {
        let counts = ConfusionCounts::new(0, 0, 1, 0);
        assert_eq!(counts.stress_matching(), Err(MetricsError::NoStressedRecords));
        assert_eq!(
            counts.nonstress_matching(NmFormula::PaperFormula),
            Err(MetricsError::NoDenominator)
        );
        let single = ConfusionCounts::new(1, 0, 0, 0);
        assert_eq!(single.accuracy().unwrap(), Fraction::from_integer(1));
        let all_weak = ConfusionCounts::new(0, 5, 0, 0);
        assert_eq!(all_weak.stress_matching().unwrap(), Fraction::from_integer(0));
        assert_eq!(
            all_weak.nonstress_matching(NmFormula::PaperFormula).unwrap(),
            Fraction::from_integer(0)
        );
    }

    #[test]
    fn harmonic_mean_reproduces_published_scores() {
        assert!((lrm_score(0.796, 0.737) - 0.765).abs() < 1e-3);
        assert!((lrm_score(0.594, 0.424) - 0.495).abs() < 1e-3);
        assert_eq!(lrm_score(0.42, 0.42), 0.42);
        assert_eq!(lrm_score(0.0, 0.0), 0.0);
    }

    #[test]
    fn conditional_probability_is_an_exact_count_ratio() {
        let records = fixture_word_records();
        // P(keyword on weak | keyword) = 2/8 on the fixture.
        let p = conditional_probability(&records, events::stressed_on_weak, events::stressed)
            .unwrap();
        assert_eq!(p, Fraction::new(1, 4));
        assert_eq!(p * Fraction::from_integer(8), Fraction::from_integer(2));

        let same = conditional_probability(&records, events::strong, events::strong).unwrap();
        assert_eq!(same, Fraction::from_integer(1));
        let disjoint = conditional_probability(&records, events::weak, events::strong).unwrap();
        assert_eq!(disjoint, Fraction::from_integer(0));
        assert_eq!(
            conditional_probability(&[], events::strong, events::strong),
            Err(MetricsError::ZeroConditionCount)
        );
    }

    #[test]
    fn distribution_reports_both_directions() {
        let records = fixture_word_records();
        let dist = distribution(&records).unwrap();
        assert_eq!(dist.stressed_share, Fraction::new(8, 17));
        assert_eq!(dist.stressed_on_strong.unwrap(), Fraction::new(6, 8));
        assert_eq!(dist.strong_from_stressed.unwrap(), Fraction::new(6, 9));
        assert_eq!(dist.weak_from_unstressed.unwrap(), Fraction::new(6, 8));

        let single = vec![record(LleKind::Word, true, true, true)];
        let dist = distribution(&single).unwrap();
        assert_eq!(dist.stressed_share, Fraction::from_integer(1));
        assert_eq!(dist.unstressed_on_weak, None, "no unstressed records");

        assert_eq!(distribution(&[]), Err(MetricsError::EmptyRecords));
    }

    #[test]
    fn ols_recovers_exact_lines() {
        let fit = ols_fit(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!(fit.slope, 1.0);
        assert_eq!(fit.intercept, 0.0);
        assert_eq!(fit.r, 1.0);
        assert_eq!(fit.n, 3);

        let flat = ols_fit(&[(1.0, 2.0), (2.0, 2.0), (3.0, 2.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.intercept, 2.0);
        assert_eq!(flat.r, 0.0, "flat y has no correlation by convention");

        assert!(matches!(
            ols_fit(&[(1.0, 1.0)]),
            Err(MetricsError::DegenerateX(_))
        ));
        assert!(matches!(
            ols_fit(&[(2.0, 1.0), (2.0, 3.0)]),
            Err(MetricsError::DegenerateX(_))
        ));
    }

    #[test]
    fn weak_beat_points_group_by_song() {
        let mut records = fixture_word_records();
        let mut other = record(LleKind::Word, true, false, false);
        other.song = "b".into();
        records.push(other);
        let points = weak_beat_points(&records);
        assert_eq!(points, vec![("b".into(), 1, 1), ("s".into(), 8, 2)]);
    }
}
