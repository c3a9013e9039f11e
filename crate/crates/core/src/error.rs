//! One error type for the whole library; variants carry enough context
//! (path, line, month, term) for the CLI to print actionable messages.

use std::path::PathBuf;

use crate::month::Month;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed manifest record: {reason}")]
    ManifestLine { path: PathBuf, line: usize, reason: String },

    #[error("{path}:{line}: duplicate document id \"{id}\"")]
    DuplicateDocId { path: PathBuf, line: usize, id: String },

    #[error("{path}: not valid UTF-8 text")]
    NonUtf8 { path: PathBuf },

    #[error("invalid month \"{0}\" (want YYYY-MM)")]
    MonthFormat(String),

    #[error("{path}: lexicon has no terms")]
    LexiconEmpty { path: PathBuf },

    #[error("{path}:{line}: lexicon term \"{term}\" contains whitespace")]
    LexiconTerm { path: PathBuf, line: usize, term: String },

    #[error("month {month} has zero total characters; cannot score it")]
    EmptyMonth { month: Month },

    #[error("series has duplicate month {month}")]
    DuplicateMonth { month: Month },

    #[error("series has a gap: expected {expected}, found {found}")]
    SeriesGap { expected: Month, found: Month },

    #[error("non-finite value at month {month}")]
    NonFiniteValue { month: Month },

    #[error("non-finite value in {0}")]
    NonFiniteData(&'static str),

    #[error("{path}:{line}: {reason}")]
    CsvLine { path: PathBuf, line: usize, reason: String },

    #[error("{path}: expected header \"{expected}\", found \"{found}\"")]
    CsvHeader { path: PathBuf, expected: &'static str, found: String },

    #[error("not enough data for {what}: have {have}, need at least {need}")]
    NotEnoughData { what: &'static str, have: usize, need: usize },

    #[error("missing consensus value for month {month}")]
    MissingConsensus { month: Month },

    #[error("target and predictor do not overlap at this horizon")]
    EmptyAlignment,

    #[error("x and y lengths differ ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },

    #[error("predictor is constant; slope is undefined")]
    ConstantPredictor,

    #[error("residuals are identically zero")]
    DegenerateResiduals,

    #[error("sample has zero variance")]
    ZeroVariance,

    #[error("sample size {n} outside supported range [{min}, {max}]")]
    SampleOutOfRange { n: usize, min: usize, max: usize },

    #[error("augmented regressors are collinear; specification test undefined")]
    CollinearAugmentation,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("data does not cover month(s) {}", format_months(.0))]
    WindowNotCovered(Vec<Month>),
}

fn format_months(months: &[Month]) -> String {
    const SHOWN: usize = 6;
    let mut parts: Vec<String> = months.iter().take(SHOWN).map(|m| m.to_string()).collect();
    if months.len() > SHOWN {
        parts.push(format!("... ({} total)", months.len()));
    }
    parts.join(", ")
}
