//! Emotion lexicons, tokenization, scoring, and the monthly net-emotion
//! series.
//!
//! The scoring rule is deliberately plain: exact token-level matches against
//! two word lists, no stemming, no phrases, no weights. The monthly statistic
//! is (excitement hits - anxiety hits) / total characters, summed over every
//! document in the month.

use std::collections::HashSet;
use std::fs;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{Document, MonthlyBuckets};
use crate::error::Error;
use crate::month::Month;
use crate::numfmt;

/// A named set of lowercase single-word terms.
#[derive(Clone, Debug)]
pub struct Lexicon {
    name: String,
    terms: HashSet<String>,
}

impl Lexicon {
    /// Builds a lexicon from terms already known to be valid (lowercase,
    /// non-empty, no whitespace). File input must go through
    /// [`load_lexicon`], which validates and reports line context.
    pub fn from_terms<I, S>(name: &str, terms: I) -> Lexicon
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let terms: HashSet<String> = terms.into_iter().map(Into::into).collect();
        debug_assert!(!terms.is_empty());
        debug_assert!(terms.iter().all(|t| !t.is_empty() && !t.contains(char::is_whitespace)));
        Lexicon { name: name.to_string(), terms }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.terms.contains(token)
    }

    /// Terms shared with another lexicon, sorted. A shared term counts for
    /// both emotions when scoring; callers surface this as a warning.
    pub fn overlap(&self, other: &Lexicon) -> Vec<String> {
        let mut shared: Vec<String> =
            self.terms.intersection(&other.terms).cloned().collect();
        shared.sort();
        shared
    }
}

/// Parses a lexicon file: one term per line, `#` lines are comments, blank
/// lines are skipped, terms lowercased and trimmed.
pub fn load_lexicon(path: &Path, name: &str) -> Result<Lexicon, Error> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut terms = HashSet::new();
    for (idx, line) in raw.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.contains(char::is_whitespace) {
            return Err(Error::LexiconTerm {
                path: path.into(),
                line: idx + 1,
                term: trimmed.to_string(),
            });
        }
        terms.insert(trimmed.to_lowercase());
    }
    if terms.is_empty() {
        return Err(Error::LexiconEmpty { path: path.into() });
    }
    Ok(Lexicon { name: name.to_string(), terms })
}

/// Splits text into lowercase tokens. A token is a maximal run of alphabetic
/// characters plus ASCII apostrophes and hyphens; apostrophes and hyphens are
/// kept only when internal ("risk-off", "don't"), stripped at token edges.
/// Everything else separates, including em-dashes and typographic quotes.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut run = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphabetic() || c == '\'' || c == '-' {
            run.push(c);
        } else if !run.is_empty() {
            let core = run.trim_matches(|c| c == '\'' || c == '-');
            if !core.is_empty() {
                tokens.push(core.to_lowercase());
            }
            run.clear();
        }
    }
    tokens
}

/// Raw emotion-word and character counts. Additive: counts for a set of
/// documents are the componentwise sum of per-document counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EmotionCounts {
    pub excitement: u64,
    pub anxiety: u64,
    pub chars: u64,
}

impl Add for EmotionCounts {
    type Output = EmotionCounts;

    fn add(self, rhs: EmotionCounts) -> EmotionCounts {
        EmotionCounts {
            excitement: self.excitement + rhs.excitement,
            anxiety: self.anxiety + rhs.anxiety,
            chars: self.chars + rhs.chars,
        }
    }
}

impl AddAssign for EmotionCounts {
    fn add_assign(&mut self, rhs: EmotionCounts) {
        *self = *self + rhs;
    }
}

impl Sum for EmotionCounts {
    fn sum<I: Iterator<Item = EmotionCounts>>(iter: I) -> EmotionCounts {
        iter.fold(EmotionCounts::default(), Add::add)
    }
}

pub fn score_document(doc: &Document, excite: &Lexicon, anx: &Lexicon) -> EmotionCounts {
    let mut counts = EmotionCounts { chars: doc.char_count, ..Default::default() };
    for token in tokenize(&doc.text) {
        if excite.contains(&token) {
            counts.excitement += 1;
        }
        if anx.contains(&token) {
            counts.anxiety += 1;
        }
    }
    counts
}

/// Per-month raw counts in month order. Scoring runs in parallel across
/// documents; integer sums are order-independent, so the result is
/// schedule-independent.
pub fn monthly_counts(
    buckets: &MonthlyBuckets,
    excite: &Lexicon,
    anx: &Lexicon,
) -> Vec<(Month, EmotionCounts)> {
    buckets
        .iter()
        .map(|(month, docs)| {
            let total = docs.par_iter().map(|d| score_document(d, excite, anx)).sum();
            (month, total)
        })
        .collect()
}

/// Folds per-month counts into the monthly net-emotion value
/// (excitement - anxiety) / chars with the given label.
pub fn sentiment_from_counts(
    counts: &[(Month, EmotionCounts)],
    label: &str,
) -> Result<SentimentSeries, Error> {
    let pairs = counts
        .iter()
        .map(|&(month, c)| {
            if c.chars == 0 {
                return Err(Error::EmptyMonth { month });
            }
            let value = (c.excitement as f64 - c.anxiety as f64) / c.chars as f64;
            Ok((month, value))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SentimentSeries::from_pairs(label, pairs)
}

/// The BROKER series: monthly net-emotion over the bucketed corpus.
pub fn monthly_sentiment(
    buckets: &MonthlyBuckets,
    excite: &Lexicon,
    anx: &Lexicon,
) -> Result<SentimentSeries, Error> {
    sentiment_from_counts(&monthly_counts(buckets, excite, anx), "BROKER")
}

/// A labelled monthly series over gap-free consecutive months.
#[derive(Clone, Debug, PartialEq)]
pub struct SentimentSeries {
    label: String,
    start: Option<Month>,
    values: Vec<f64>,
}

impl SentimentSeries {
    /// Builds a series from (month, value) pairs, which must be strictly
    /// ascending with no gaps; values must be finite.
    pub fn from_pairs(label: &str, pairs: Vec<(Month, f64)>) -> Result<SentimentSeries, Error> {
        let start = pairs.first().map(|&(m, _)| m);
        let mut values = Vec::with_capacity(pairs.len());
        for (i, (month, value)) in pairs.into_iter().enumerate() {
            let expected = start.unwrap().offset(i as i32);
            if month != expected {
                if month < expected {
                    return Err(Error::DuplicateMonth { month });
                }
                return Err(Error::SeriesGap { expected, found: month });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteValue { month });
            }
            values.push(value);
        }
        Ok(SentimentSeries { label: label.to_string(), start, values })
    }

    /// Builds a series from a start month and consecutive values.
    pub fn from_start(label: &str, start: Month, values: Vec<f64>) -> Result<SentimentSeries, Error> {
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { month: start.offset(i as i32) });
            }
        }
        let start = if values.is_empty() { None } else { Some(start) };
        Ok(SentimentSeries { label: label.to_string(), start, values })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first_month(&self) -> Option<Month> {
        self.start
    }

    pub fn last_month(&self) -> Option<Month> {
        self.start.map(|s| s.offset(self.values.len() as i32 - 1))
    }

    pub fn get(&self, month: Month) -> Option<f64> {
        let start = self.start?;
        if month < start {
            return None;
        }
        let idx = month.months_since(start) as usize;
        self.values.get(idx).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (Month, f64)> + '_ {
        let start = self.start;
        self.values.iter().enumerate().map(move |(i, &v)| (start.unwrap().offset(i as i32), v))
    }

    /// Serializes as `month,value` CSV with 10 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("month,value\n");
        for (month, value) in self.iter() {
            out.push_str(&format!("{month},{}\n", numfmt::sig(value, 10)));
        }
        out
    }
}

/// First difference: value at m is s(m) - s(m-1), label prefixed "DIFF".
pub fn diff_series(s: &SentimentSeries) -> Result<SentimentSeries, Error> {
    if s.len() < 2 {
        return Err(Error::NotEnoughData {
            what: "series to difference",
            have: s.len(),
            need: 2,
        });
    }
    let diffs: Vec<f64> = s.values.windows(2).map(|w| w[1] - w[0]).collect();
    SentimentSeries::from_start(
        &format!("DIFF{}", s.label),
        s.first_month().unwrap().offset(1),
        diffs,
    )
}

/// Reads a `month,value` CSV into a series with the given label.
pub fn read_series_csv(path: &Path, label: &str) -> Result<SentimentSeries, Error> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut lines = raw.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim_end()).unwrap_or("");
    if header != "month,value" {
        return Err(Error::CsvHeader {
            path: path.into(),
            expected: "month,value",
            found: header.to_string(),
        });
    }
    let mut pairs = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::CsvLine { path: path.into(), line: idx + 1, reason };
        let (month_str, value_str) =
            line.split_once(',').ok_or_else(|| bad("expected 2 fields".to_string()))?;
        let month: Month =
            month_str.parse().map_err(|e: Error| bad(e.to_string()))?;
        let value: f64 = value_str
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid number {value_str:?}")))?;
        pairs.push((month, value));
    }
    SentimentSeries::from_pairs(label, pairs)
}
