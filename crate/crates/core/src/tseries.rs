//! Index-table handling, forecast-target construction, ex-ante alignment,
//! and the ACF integration-order check.
//!
//! The alignment convention is the load-bearing part: the target for month t
//! is preliminary(t) - final(t-h), and the predictor attached to it is dated
//! t-h, so no row ever sees information later than month t-h.

use std::fs;
use std::path::Path;

use crate::emolex::SentimentSeries;
use crate::error::Error;
use crate::month::Month;
use crate::numfmt;

/// One month's index values. `consensus` is the polled forecast of the
/// preliminary value, present only where a benchmark comparison is wanted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexRecord {
    pub preliminary: f64,
    pub final_value: f64,
    pub consensus: Option<f64>,
}

/// Month-indexed preliminary/final/consensus values over consecutive months.
#[derive(Clone, Debug)]
pub struct IndexTable {
    start: Month,
    records: Vec<IndexRecord>,
}

impl IndexTable {
    /// Builds a table from rows in ascending month order with no gaps.
    pub fn from_rows(rows: Vec<(Month, IndexRecord)>) -> Result<IndexTable, Error> {
        let Some(&(start, _)) = rows.first() else {
            return Err(Error::NotEnoughData { what: "index table", have: 0, need: 1 });
        };
        let mut records = Vec::with_capacity(rows.len());
        for (i, (month, rec)) in rows.into_iter().enumerate() {
            let expected = start.offset(i as i32);
            if month != expected {
                if month < expected {
                    return Err(Error::DuplicateMonth { month });
                }
                return Err(Error::SeriesGap { expected, found: month });
            }
            let finite =
                rec.preliminary.is_finite() && rec.final_value.is_finite() && rec.consensus.is_none_or(f64::is_finite);
            if !finite {
                return Err(Error::NonFiniteValue { month });
            }
            records.push(rec);
        }
        Ok(IndexTable { start, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first_month(&self) -> Month {
        self.start
    }

    pub fn last_month(&self) -> Month {
        self.start.offset(self.records.len() as i32 - 1)
    }

    pub fn get(&self, month: Month) -> Option<&IndexRecord> {
        if month < self.start {
            return None;
        }
        self.records.get(month.months_since(self.start) as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Month, &IndexRecord)> {
        self.records.iter().enumerate().map(|(i, r)| (self.start.offset(i as i32), r))
    }

    /// Serializes as `month,preliminary,final,consensus` CSV; a missing
    /// consensus leaves the field empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("month,preliminary,final,consensus\n");
        for (month, rec) in self.iter() {
            let consensus = rec.consensus.map(|c| numfmt::sig(c, 10)).unwrap_or_default();
            out.push_str(&format!(
                "{month},{},{},{consensus}\n",
                numfmt::sig(rec.preliminary, 10),
                numfmt::sig(rec.final_value, 10),
            ));
        }
        out
    }
}

/// Reads a `month,preliminary,final,consensus` CSV.
pub fn read_index_csv(path: &Path) -> Result<IndexTable, Error> {
    let raw = fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut lines = raw.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim_end()).unwrap_or("");
    if header != "month,preliminary,final,consensus" {
        return Err(Error::CsvHeader {
            path: path.into(),
            expected: "month,preliminary,final,consensus",
            found: header.to_string(),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| Error::CsvLine { path: path.into(), line: idx + 1, reason };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", fields.len())));
        }
        let month: Month = fields[0].parse().map_err(|e: Error| bad(e.to_string()))?;
        let number = |s: &str| -> Result<f64, Error> {
            s.trim().parse().map_err(|_| bad(format!("invalid number {s:?}")))
        };
        let preliminary = number(fields[1])?;
        let final_value = number(fields[2])?;
        let consensus = if fields[3].trim().is_empty() { None } else { Some(number(fields[3])?) };
        rows.push((month, IndexRecord { preliminary, final_value, consensus }));
    }
    IndexTable::from_rows(rows)
}

fn target_label(horizon: u32) -> String {
    if horizon == 1 {
        "DIFFPRELIM".to_string()
    } else {
        format!("DIFFPRELIM_H{horizon}")
    }
}

/// The forecasting target at horizon h: preliminary(t) - final(t-h) for
/// every month t where both exist.
pub fn build_target(table: &IndexTable, horizon: u32) -> Result<SentimentSeries, Error> {
    assert!(horizon >= 1, "horizon must be at least 1");
    let h = horizon as usize;
    if table.len() < h + 1 {
        return Err(Error::NotEnoughData { what: "index table", have: table.len(), need: h + 1 });
    }
    let values: Vec<f64> = (h..table.len())
        .map(|i| table.records[i].preliminary - table.records[i - h].final_value)
        .collect();
    SentimentSeries::from_start(&target_label(horizon), table.start.offset(horizon as i32), values)
}

/// The benchmark predictor: consensus(t) - final(t-1) over the requested
/// window (inclusive), defaulting to every month after the table's first.
/// A missing consensus inside the window is an error.
pub fn build_consensus_diff(
    table: &IndexTable,
    window: Option<(Month, Month)>,
) -> Result<SentimentSeries, Error> {
    if table.len() < 2 {
        return Err(Error::NotEnoughData { what: "index table", have: table.len(), need: 2 });
    }
    let (from, to) = window.unwrap_or((table.start.offset(1), table.last_month()));
    let outside: Vec<Month> = Month::range_inclusive(from, to)
        .filter(|&t| table.get(t).is_none() || table.get(t.offset(-1)).is_none())
        .collect();
    if !outside.is_empty() {
        return Err(Error::WindowNotCovered(outside));
    }
    let values = Month::range_inclusive(from, to)
        .map(|t| {
            let consensus =
                table.get(t).unwrap().consensus.ok_or(Error::MissingConsensus { month: t })?;
            Ok(consensus - table.get(t.offset(-1)).unwrap().final_value)
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    SentimentSeries::from_start("DIFFCONSENSUS", from, values)
}

/// One aligned observation: the target value for `target_month` paired with
/// the predictor value dated `target_month - horizon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlignedRow {
    pub target_month: Month,
    pub y: f64,
    pub x: f64,
}

#[derive(Clone, Debug)]
pub struct AlignedDataset {
    pub rows: Vec<AlignedRow>,
    pub horizon: u32,
    pub target_label: String,
    pub predictor_label: String,
}

impl AlignedDataset {
    pub fn row(&self, target_month: Month) -> Option<&AlignedRow> {
        self.rows.iter().find(|r| r.target_month == target_month)
    }

    pub fn xy(&self) -> (Vec<f64>, Vec<f64>) {
        (self.rows.iter().map(|r| r.x).collect(), self.rows.iter().map(|r| r.y).collect())
    }

    /// Serializes as `target_month,y,x` CSV for audit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("target_month,y,x\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.target_month,
                numfmt::sig(row.y, 10),
                numfmt::sig(row.x, 10),
            ));
        }
        out
    }
}

/// Pairs y(t) with x(t-h) for every target month t where both exist, in
/// chronological order. Horizon 0 pairs same-month values, the shape of a
/// realized-versus-prediction comparison.
pub fn align(
    target: &SentimentSeries,
    predictor: &SentimentSeries,
    horizon: u32,
) -> Result<AlignedDataset, Error> {
    let rows: Vec<AlignedRow> = target
        .iter()
        .filter_map(|(t, y)| {
            let x = predictor.get(t.offset(-(horizon as i32)))?;
            Some(AlignedRow { target_month: t, y, x })
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::EmptyAlignment);
    }
    Ok(AlignedDataset {
        rows,
        horizon,
        target_label: target.label().to_string(),
        predictor_label: predictor.label().to_string(),
    })
}

#[derive(Clone, Copy, Debug)]
pub struct AcfLag {
    pub lag: u32,
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct AcfResult {
    pub lags: Vec<AcfLag>,
    /// The +-1.96/sqrt(n) two-sided significance bound.
    pub bound: f64,
}

impl AcfResult {
    /// Lags whose |r| exceeds the bound.
    pub fn significant(&self) -> Vec<u32> {
        self.lags.iter().filter(|l| l.r.abs() > self.bound).map(|l| l.lag).collect()
    }
}

/// Sample autocorrelations r(1)..r(max_lag) with the biased estimator
/// (full-sample sum of squares as divisor), which keeps |r| <= 1.
pub fn acf(s: &SentimentSeries, max_lag: u32) -> Result<AcfResult, Error> {
    assert!(max_lag >= 1, "max_lag must be at least 1");
    let n = s.len();
    if n <= max_lag as usize {
        return Err(Error::NotEnoughData {
            what: "series for autocorrelation",
            have: n,
            need: max_lag as usize + 1,
        });
    }
    let x = s.values();
    let mean = x.iter().sum::<f64>() / n as f64;
    let den: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if den == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let lags = (1..=max_lag)
        .map(|k| {
            let num: f64 =
                (k as usize..n).map(|t| (x[t] - mean) * (x[t - k as usize] - mean)).sum();
            AcfLag { lag: k, r: num / den }
        })
        .collect();
    Ok(AcfResult { lags, bound: 1.96 / (n as f64).sqrt() })
}
