//! Emotion-lexicon scoring of a dated document corpus and a strictly
//! ex-ante expanding-window regression backtest against a monthly index.
//!
//! The pipeline reads bottom to top: [`corpus`] loads and month-buckets
//! documents, [`emolex`] scores them into the monthly BROKER series,
//! [`tseries`] builds forecast targets from the index table and aligns
//! predictor with target at a horizon, [`olsreg`] fits the bivariate
//! regressions with the diagnostic suite, and [`backtest`] walks the
//! expanding window and evaluates the forecasts.

pub mod backtest;
pub mod corpus;
pub mod emolex;
pub mod error;
pub mod month;
pub mod numfmt;
pub mod olsreg;
pub mod tseries;

pub use error::Error;
pub use month::Month;
