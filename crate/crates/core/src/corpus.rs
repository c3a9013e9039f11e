//! Corpus ingestion: manifest parsing, document loading, month bucketing.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::Error;
use crate::month::Month;

/// One manifest line: a dated document belonging to a source (a broker
/// desk, a feed, a generator run). `path` is relative to the corpus root.
#[derive(Clone, Debug)]
pub struct DocumentEntry {
    pub id: String,
    pub source: String,
    pub date: NaiveDate,
    pub path: PathBuf,
}

impl DocumentEntry {
    pub fn month(&self) -> Month {
        Month::from_date(self.date)
    }
}

/// A loaded document. `char_count` is the number of Unicode scalar values
/// in the decoded text, including whitespace and punctuation, fixed once at
/// load time; it is the normalization denominator downstream.
#[derive(Clone, Debug)]
pub struct Document {
    pub entry: DocumentEntry,
    pub text: String,
    pub char_count: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: String,
    source: String,
    date: String,
    path: String,
}

/// Parses a JSON-lines manifest. Entries come back in file order; blank
/// lines are skipped; a duplicate id or any malformed line is an error
/// naming the offending line.
pub fn load_manifest(path: &Path) -> Result<Vec<DocumentEntry>, Error> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let bad = |reason: String| Error::ManifestLine { path: path.into(), line: lineno, reason };
        let rec: RawEntry = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let date = parse_date(&rec.date).ok_or_else(|| {
            bad(format!("invalid date {:?} (want YYYY-MM-DD)", rec.date))
        })?;
        if rec.path.is_empty() {
            return Err(bad("empty path".to_string()));
        }
        if !seen.insert(rec.id.clone()) {
            return Err(Error::DuplicateDocId { path: path.into(), line: lineno, id: rec.id });
        }
        entries.push(DocumentEntry { id: rec.id, source: rec.source, date, path: rec.path.into() });
    }
    Ok(entries)
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    // Zero-padded YYYY-MM-DD only; chrono alone would accept "2021-1-4".
    if s.len() != 10 || s.as_bytes()[4] != b'-' || s.as_bytes()[7] != b'-' {
        return None;
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

pub fn read_document(entry: &DocumentEntry, root: &Path) -> Result<Document, Error> {
    let path = root.join(&entry.path);
    let bytes = fs::read(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
    let text = String::from_utf8(bytes).map_err(|_| Error::NonUtf8 { path })?;
    let char_count = text.chars().count() as u64;
    Ok(Document { entry: entry.clone(), text, char_count })
}

/// Reads every entry in parallel; output order matches input order, so the
/// result is independent of scheduling.
pub fn read_documents(entries: &[DocumentEntry], root: &Path) -> Result<Vec<Document>, Error> {
    entries.par_iter().map(|e| read_document(e, root)).collect()
}

/// Documents grouped by the calendar month of their manifest date. Months
/// with no documents simply do not appear.
#[derive(Debug, Default)]
pub struct MonthlyBuckets {
    buckets: BTreeMap<Month, Vec<Document>>,
}

impl MonthlyBuckets {
    pub fn iter(&self) -> impl Iterator<Item = (Month, &[Document])> {
        self.buckets.iter().map(|(m, docs)| (*m, docs.as_slice()))
    }

    pub fn get(&self, month: Month) -> Option<&[Document]> {
        self.buckets.get(&month).map(Vec::as_slice)
    }

    pub fn month_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn doc_count(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn first_month(&self) -> Option<Month> {
        self.buckets.keys().next().copied()
    }

    pub fn last_month(&self) -> Option<Month> {
        self.buckets.keys().next_back().copied()
    }
}

/// Partitions documents by month. Every document lands in exactly one
/// bucket; input order within a month is preserved but nothing downstream
/// depends on it.
pub fn bucket_by_month(docs: Vec<Document>) -> MonthlyBuckets {
    let mut buckets: BTreeMap<Month, Vec<Document>> = BTreeMap::new();
    for doc in docs {
        buckets.entry(doc.entry.month()).or_default().push(doc);
    }
    MonthlyBuckets { buckets }
}

/// Splits entries into those dated inside `[start, end]` and those outside.
/// Out-of-window documents are dropped with a warning by callers, never an
/// error: archives are messy.
pub fn split_by_window(
    entries: Vec<DocumentEntry>,
    start: Option<Month>,
    end: Option<Month>,
) -> (Vec<DocumentEntry>, Vec<DocumentEntry>) {
    entries.into_iter().partition(|e| {
        let m = e.month();
        start.is_none_or(|s| m >= s) && end.is_none_or(|e| m <= e)
    })
}
