//! Expanding-window ex-ante backtesting, sign-accuracy scoring, the
//! realized-on-predicted benchmark regression, and the multi-horizon study.
//!
//! The protocol: fit on target months [train_start, t-1], predict month t
//! from the predictor dated t-horizon, advance one month, refit. The
//! training window start never moves, so each refit only ever adds the one
//! newly realized month.

use std::collections::BTreeMap;

use crate::emolex::SentimentSeries;
use crate::error::Error;
use crate::month::Month;
use crate::numfmt;
use crate::olsreg::{self, Coefficient, OlsFit};
use crate::tseries::{self, AlignedDataset, IndexTable};

#[derive(Clone, Copy, Debug)]
pub struct BacktestConfig {
    pub train_start: Month,
    pub forecast_start: Month,
    pub forecast_end: Month,
    pub horizon: u32,
}

impl BacktestConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.horizon < 1 {
            return Err(Error::InvalidConfig("horizon must be at least 1".to_string()));
        }
        if self.train_start >= self.forecast_start {
            return Err(Error::InvalidConfig(format!(
                "train_start {} must precede forecast_start {}",
                self.train_start, self.forecast_start
            )));
        }
        if self.forecast_start > self.forecast_end {
            return Err(Error::InvalidConfig(format!(
                "forecast_start {} is after forecast_end {}",
                self.forecast_start, self.forecast_end
            )));
        }
        Ok(())
    }

    fn with_horizon(self, horizon: u32) -> BacktestConfig {
        BacktestConfig { horizon, ..self }
    }
}

/// One forecast step: the model fitted through t-1 and its prediction for t.
#[derive(Clone, Copy, Debug)]
pub struct BacktestStep {
    pub target_month: Month,
    pub predicted: f64,
    pub realized: f64,
    pub sign_hit: bool,
    pub fit_n: usize,
    pub intercept: f64,
    pub slope: f64,
}

#[derive(Clone, Debug)]
pub struct BacktestResult {
    pub steps: Vec<BacktestStep>,
    pub horizon: u32,
}

impl BacktestResult {
    pub fn predicted(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.predicted).collect()
    }

    pub fn realized(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.realized).collect()
    }

    /// Serializes as
    /// `target_month,predicted,realized,sign_hit,fit_n,intercept,slope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("target_month,predicted,realized,sign_hit,fit_n,intercept,slope\n");
        for s in &self.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.target_month,
                numfmt::sig(s.predicted, 10),
                numfmt::sig(s.realized, 10),
                s.sign_hit,
                s.fit_n,
                numfmt::sig(s.intercept, 10),
                numfmt::sig(s.slope, 10),
            ));
        }
        out
    }
}

/// Zero counts as positive; predictions and realizations agree in sign when
/// they sit on the same side of that convention.
fn same_sign(predicted: f64, realized: f64) -> bool {
    (predicted >= 0.0) == (realized >= 0.0)
}

/// Runs the expanding-window protocol over aligned rows.
pub fn expanding_backtest(
    data: &AlignedDataset,
    cfg: &BacktestConfig,
) -> Result<BacktestResult, Error> {
    cfg.validate()?;
    if data.horizon != cfg.horizon {
        return Err(Error::InvalidConfig(format!(
            "aligned data was built at horizon {}, config asks for {}",
            data.horizon, cfg.horizon
        )));
    }
    let missing: Vec<Month> = Month::range_inclusive(cfg.train_start, cfg.forecast_end)
        .filter(|&m| data.row(m).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(Error::WindowNotCovered(missing));
    }
    let initial: Vec<_> = data
        .rows
        .iter()
        .filter(|r| r.target_month >= cfg.train_start && r.target_month < cfg.forecast_start)
        .collect();
    if initial.len() < 3 {
        return Err(Error::NotEnoughData {
            what: "initial training window",
            have: initial.len(),
            need: 3,
        });
    }

    let mut steps = Vec::new();
    for t in Month::range_inclusive(cfg.forecast_start, cfg.forecast_end) {
        let (x, y): (Vec<f64>, Vec<f64>) = data
            .rows
            .iter()
            .filter(|r| r.target_month >= cfg.train_start && r.target_month < t)
            .map(|r| (r.x, r.y))
            .unzip();
        let fit = olsreg::fit_ols(&x, &y)?;
        let row = data.row(t).expect("coverage checked above");
        let predicted = olsreg::predict(&fit, row.x);
        steps.push(BacktestStep {
            target_month: t,
            predicted,
            realized: row.y,
            sign_hit: same_sign(predicted, row.y),
            fit_n: fit.n,
            intercept: fit.intercept,
            slope: fit.slope,
        });
    }
    Ok(BacktestResult { steps, horizon: cfg.horizon })
}

/// Counts steps whose predicted sign matched the realized sign.
pub fn sign_hit_rate(result: &BacktestResult) -> Result<(usize, usize), Error> {
    if result.steps.is_empty() {
        return Err(Error::NotEnoughData { what: "backtest steps", have: 0, need: 1 });
    }
    let hits = result.steps.iter().filter(|s| s.sign_hit).count();
    Ok((hits, result.steps.len()))
}

/// Regresses realized outcomes on predictions across steps; unbiased
/// forecasts give intercept 0 and slope 1.
pub fn realized_on_predicted(result: &BacktestResult) -> Result<OlsFit, Error> {
    if result.steps.len() < 3 {
        return Err(Error::NotEnoughData {
            what: "backtest steps",
            have: result.steps.len(),
            need: 3,
        });
    }
    olsreg::fit_ols(&result.predicted(), &result.realized())
}

#[derive(Clone, Copy, Debug)]
pub struct UnbiasednessVerdict {
    pub unbiased: bool,
    pub t_intercept: f64,
    pub t_slope_vs_one: f64,
}

/// Two-sided tests of intercept = 0 and slope = 1 at level alpha; the
/// forecasts count as unbiased when neither rejects.
pub fn unbiasedness_verdict(fit: &OlsFit, alpha: f64) -> Result<UnbiasednessVerdict, Error> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha {alpha} outside (0, 1)")));
    }
    let (t_intercept, p_intercept) = olsreg::coeff_t_test(fit, Coefficient::Intercept, 0.0);
    let (t_slope_vs_one, p_slope) = olsreg::coeff_t_test(fit, Coefficient::Slope, 1.0);
    Ok(UnbiasednessVerdict {
        unbiased: p_intercept > alpha && p_slope > alpha,
        t_intercept,
        t_slope_vs_one,
    })
}

/// Builds the target, aligns, and backtests once per horizon with identical
/// forecast months.
pub fn horizon_study(
    table: &IndexTable,
    predictor: &SentimentSeries,
    cfg: &BacktestConfig,
    horizons: &[u32],
) -> Result<BTreeMap<u32, BacktestResult>, Error> {
    if horizons.is_empty() {
        return Err(Error::InvalidConfig("no horizons requested".to_string()));
    }
    let mut results = BTreeMap::new();
    for &h in horizons {
        let cfg_h = cfg.with_horizon(h);
        let target = tseries::build_target(table, h)?;
        let aligned = tseries::align(&target, predictor, h)?;
        results.insert(h, expanding_backtest(&aligned, &cfg_h)?);
    }
    Ok(results)
}

/// Figure data: per target month the realized change next to both the
/// consensus prediction and the model prediction. A missing consensus
/// leaves that field empty.
pub fn figure_csv(result: &BacktestResult, consensus: Option<&SentimentSeries>) -> String {
    let mut out = String::from("target_month,realized,consensus_predicted,broker_predicted\n");
    for s in &result.steps {
        let consensus_value = consensus
            .and_then(|c| c.get(s.target_month))
            .map(|v| numfmt::sig(v, 10))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{consensus_value},{}\n",
            s.target_month,
            numfmt::sig(s.realized, 10),
            numfmt::sig(s.predicted, 10),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tseries::{AlignedRow, IndexRecord};
    use proptest::prelude::*;

    fn month(s: &str) -> Month {
        s.parse().unwrap()
    }

    fn paper_shaped_config() -> BacktestConfig {
        BacktestConfig {
            train_start: month("2010-08"),
            forecast_start: month("2012-05"),
            forecast_end: month("2013-07"),
            horizon: 1,
        }
    }

    // 36 aligned rows Aug 2010 .. Jul 2013 with y = 2x exactly.
    fn exact_linear_rows() -> AlignedDataset {
        let start = month("2010-08");
        let rows: Vec<AlignedRow> = (0..36)
            .map(|i| {
                let x = (i as f64 * 0.37).sin() + 0.1;
                AlignedRow { target_month: start.offset(i), y: 2.0 * x, x }
            })
            .collect();
        AlignedDataset {
            rows,
            horizon: 1,
            target_label: "DIFFPRELIM".into(),
            predictor_label: "DIFFBROKER".into(),
        }
    }

    #[test]
    fn paper_shaped_run_has_the_right_window_arithmetic() {
        let data = exact_linear_rows();
        let result = expanding_backtest(&data, &paper_shaped_config()).unwrap();
        assert_eq!(result.steps.len(), 15);
        assert_eq!(result.steps[0].fit_n, 21);
        assert_eq!(result.steps[14].fit_n, 35);
        assert_eq!(result.steps[0].target_month, month("2012-05"));
        assert_eq!(result.steps[14].target_month, month("2013-07"));
        for (i, s) in result.steps.iter().enumerate() {
            assert_eq!(s.fit_n, 21 + i);
        }
    }

    #[test]
    fn exact_model_predicts_exactly() {
        let data = exact_linear_rows();
        let result = expanding_backtest(&data, &paper_shaped_config()).unwrap();
        for s in &result.steps {
            assert!((s.predicted - s.realized).abs() < 1e-9);
            assert!(s.sign_hit);
        }
        let (hits, total) = sign_hit_rate(&result).unwrap();
        assert_eq!((hits, total), (15, 15));
    }

    #[test]
    fn missing_step_month_is_named() {
        let mut data = exact_linear_rows();
        let hole = month("2013-02");
        data.rows.retain(|r| r.target_month != hole);
        match expanding_backtest(&data, &paper_shaped_config()).unwrap_err() {
            Error::WindowNotCovered(months) => assert_eq!(months, vec![hole]),
            other => panic!("wrong error: {other}"),
        }
    }

    #[test]
    fn short_initial_window_is_rejected() {
        let data = exact_linear_rows();
        let cfg = BacktestConfig {
            train_start: month("2012-02"),
            forecast_start: month("2012-04"),
            forecast_end: month("2012-06"),
            horizon: 1,
        };
        assert!(matches!(
            expanding_backtest(&data, &cfg),
            Err(Error::NotEnoughData { have: 2, need: 3, .. })
        ));
    }

    #[test]
    fn config_ordering_is_validated() {
        let bad = BacktestConfig {
            train_start: month("2012-05"),
            forecast_start: month("2012-05"),
            forecast_end: month("2012-06"),
            horizon: 1,
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        let also_bad = BacktestConfig {
            train_start: month("2010-08"),
            forecast_start: month("2012-06"),
            forecast_end: month("2012-05"),
            horizon: 1,
        };
        assert!(matches!(also_bad.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn zero_sign_convention_is_positive() {
        assert!(same_sign(0.0, 0.0));
        assert!(same_sign(0.0, 1.5));
        assert!(!same_sign(0.0, -1.5));
        assert!(same_sign(-0.0, 2.0));
        assert!(!same_sign(-1.0, 0.0));
    }

    fn handmade_result(signs: &[(f64, f64)]) -> BacktestResult {
        let start = month("2012-05");
        let steps = signs
            .iter()
            .enumerate()
            .map(|(i, &(predicted, realized))| BacktestStep {
                target_month: start.offset(i as i32),
                predicted,
                realized,
                sign_hit: same_sign(predicted, realized),
                fit_n: 21 + i,
                intercept: 0.0,
                slope: 1.0,
            })
            .collect();
        BacktestResult { steps, horizon: 1 }
    }

    #[test]
    fn hit_rate_counts_agreements() {
        let all = handmade_result(&[(1.0, 2.0), (-1.0, -0.5), (3.0, 0.1)]);
        assert_eq!(sign_hit_rate(&all).unwrap(), (3, 3));
        let alternating = handmade_result(&[(1.0, 1.0), (1.0, -1.0), (-2.0, -1.0), (-2.0, 1.0)]);
        assert_eq!(sign_hit_rate(&alternating).unwrap(), (2, 4));
        let empty = BacktestResult { steps: Vec::new(), horizon: 1 };
        assert!(matches!(sign_hit_rate(&empty), Err(Error::NotEnoughData { .. })));
    }

    #[test]
    fn twelve_of_fifteen_fixture() {
        // Three misses planted among fifteen steps.
        let outcomes: Vec<(f64, f64)> = (0..15)
            .map(|i| {
                let predicted = if i % 2 == 0 { 1.0 } else { -1.0 };
                let realized = if [3, 7, 11].contains(&i) { -predicted } else { predicted };
                (predicted, realized)
            })
            .collect();
        let result = handmade_result(&outcomes);
        assert_eq!(sign_hit_rate(&result).unwrap(), (12, 15));
    }

    #[test]
    fn perfect_predictions_regress_to_identity() {
        let steps: Vec<(f64, f64)> = (0..15).map(|i| {
            let v = (i as f64 * 0.7).sin() * 3.0;
            (v, v)
        }).collect();
        let result = handmade_result(&steps);
        let fit = realized_on_predicted(&result).unwrap();
        assert!((fit.intercept - 0.0).abs() < 1e-12);
        assert!((fit.slope - 1.0).abs() < 1e-12);
        assert_eq!(fit.adj_r2, 1.0);
        assert_eq!(fit.n, 15);
        assert_eq!(fit.dof(), (1, 13));
    }

    #[test]
    fn orthogonal_predictions_have_zero_slope() {
        let result = handmade_result(&[(1.0, 1.0), (2.0, -1.0), (3.0, -1.0), (4.0, 1.0)]);
        let fit = realized_on_predicted(&result).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.f_stat, 0.0);
        assert_eq!(fit.f_p, 1.0);
    }

    #[test]
    fn unbiasedness_verdicts() {
        let mut fit = olsreg::fit_ols(
            &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0],
            &[1.1, 2.0, 3.2, 3.9, 5.1, 6.0, 7.2, 7.9, 9.1, 10.0, 11.2, 11.9, 13.1, 14.0, 15.2],
        )
        .unwrap();

        // Near-identity with tight errors.
        let v = unbiasedness_verdict(&fit, 0.05).unwrap();
        assert!(v.unbiased);

        // A five-sigma intercept forces rejection.
        fit.intercept = 5.0;
        fit.se_intercept = 0.1;
        let v = unbiasedness_verdict(&fit, 0.05).unwrap();
        assert!(!v.unbiased);

        // Loose published-style errors keep the verdict unbiased.
        fit.intercept = 0.347;
        fit.se_intercept = 0.852;
        fit.slope = 1.219;
        fit.se_slope = 0.323;
        fit.n = 15;
        let v = unbiasedness_verdict(&fit, 0.05).unwrap();
        assert!(v.unbiased);
        assert!((v.t_intercept - 0.347 / 0.852).abs() < 1e-12);
        assert!((v.t_slope_vs_one - 0.219 / 0.323).abs() < 1e-9);

        assert!(unbiasedness_verdict(&fit, 0.0).is_err());
        assert!(unbiasedness_verdict(&fit, 1.0).is_err());
    }

    // An index table and predictor wired so y(t) = 2 x(t-h) exactly for
    // every horizon: final values are constant, so the preliminary change
    // equals the planted signal.
    fn perfect_table(signal: &SentimentSeries, horizon: u32) -> IndexTable {
        let first = signal.first_month().unwrap();
        let rows: Vec<(Month, IndexRecord)> = signal
            .iter()
            .map(|(m, _)| {
                let preliminary = if m.months_since(first) >= horizon as i32 {
                    80.0 + 2.0 * signal.get(m.offset(-(horizon as i32))).unwrap()
                } else {
                    80.0
                };
                (m, IndexRecord { preliminary, final_value: 80.0, consensus: None })
            })
            .collect();
        IndexTable::from_rows(rows).unwrap()
    }

    #[test]
    fn horizon_study_runs_each_horizon_over_identical_months() {
        let start = month("2010-06");
        let values: Vec<f64> = (0..38)
            .map(|i| ((i % 7) as f64 - 3.0) * 1.5 + 0.25)
            .collect();
        let predictor = SentimentSeries::from_start("DIFFBROKER", start, values).unwrap();

        // Training starts four months in so even horizon 4 has aligned rows
        // covering the whole window.
        let cfg = BacktestConfig { train_start: month("2010-10"), ..paper_shaped_config() };

        // Tables are purpose-built per horizon so every horizon is exact.
        for h in 1..=4u32 {
            let table = perfect_table(&predictor, h);
            let results = horizon_study(&table, &predictor, &cfg, &[h]).unwrap();
            let result = &results[&h];
            assert_eq!(result.steps.len(), 15);
            assert_eq!(result.steps[0].target_month, month("2012-05"));
            let (hits, total) = sign_hit_rate(result).unwrap();
            assert_eq!((hits, total), (15, 15));
        }

        let table = perfect_table(&predictor, 1);
        let results = horizon_study(&table, &predictor, &cfg, &[1, 2, 3, 4]).unwrap();
        assert_eq!(results.len(), 4);
        for result in results.values() {
            assert_eq!(result.steps.len(), 15);
            assert_eq!(result.steps[0].target_month, month("2012-05"));
            assert_eq!(result.steps[14].target_month, month("2013-07"));
        }

        assert!(matches!(
            horizon_study(&table, &predictor, &cfg, &[]),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn final_step_matches_a_direct_fit() {
        let data = exact_linear_rows();
        let cfg = paper_shaped_config();
        let result = expanding_backtest(&data, &cfg).unwrap();
        let last = result.steps.last().unwrap();
        let (x, y): (Vec<f64>, Vec<f64>) = data
            .rows
            .iter()
            .filter(|r| r.target_month >= cfg.train_start && r.target_month < cfg.forecast_end)
            .map(|r| (r.x, r.y))
            .unzip();
        let direct = olsreg::fit_ols(&x, &y).unwrap();
        assert_eq!(last.intercept.to_bits(), direct.intercept.to_bits());
        assert_eq!(last.slope.to_bits(), direct.slope.to_bits());
        assert_eq!(last.fit_n, direct.n);
    }

    #[test]
    fn backtest_csv_shape() {
        let result = handmade_result(&[(0.25, -0.5)]);
        assert_eq!(
            result.to_csv(),
            "target_month,predicted,realized,sign_hit,fit_n,intercept,slope\n\
             2012-05,0.25,-0.5,false,21,0,1\n",
        );
    }

    #[test]
    fn figure_csv_includes_consensus_when_present() {
        let result = handmade_result(&[(0.25, -0.5), (1.0, 1.5)]);
        let consensus =
            SentimentSeries::from_start("DIFFCONSENSUS", month("2012-05"), vec![0.75, -0.25])
                .unwrap();
        assert_eq!(
            figure_csv(&result, Some(&consensus)),
            "target_month,realized,consensus_predicted,broker_predicted\n\
             2012-05,-0.5,0.75,0.25\n\
             2012-06,1.5,-0.25,1\n",
        );
        assert!(figure_csv(&result, None).contains("2012-05,-0.5,,0.25\n"));
    }

    fn arb_rows() -> impl Strategy<Value = Vec<(f64, f64)>> {
        proptest::collection::vec((-5.0_f64..5.0, -5.0_f64..5.0), 26..40)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn later_data_never_leaks_into_a_step(
            pairs in arb_rows(),
            probe in 0_usize..15,
            bump in 1.0_f64..100.0,
        ) {
            let start = month("2010-08");
            let rows: Vec<AlignedRow> = pairs
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| AlignedRow { target_month: start.offset(i as i32), y, x })
                .collect();
            prop_assume!(rows.iter().take(6).map(|r| r.x).any(|v| v != rows[0].x));
            let data = AlignedDataset {
                rows: rows.clone(),
                horizon: 1,
                target_label: "Y".into(),
                predictor_label: "X".into(),
            };
            let forecast_start = start.offset(6);
            let forecast_end = start.offset(rows.len() as i32 - 1);
            let cfg = BacktestConfig {
                train_start: start,
                forecast_start,
                forecast_end,
                horizon: 1,
            };
            let base = expanding_backtest(&data, &cfg).unwrap();
            prop_assume!(probe < base.steps.len());
            let t = base.steps[probe].target_month;

            // Corrupt every row strictly after the probed target month.
            let mut corrupted = data.clone();
            for r in corrupted.rows.iter_mut().filter(|r| r.target_month > t) {
                r.x += bump;
                r.y -= bump;
            }
            let again = expanding_backtest(&corrupted, &cfg).unwrap();
            let (a, b) = (&base.steps[probe], &again.steps[probe]);
            prop_assert_eq!(a.predicted.to_bits(), b.predicted.to_bits());
            prop_assert_eq!(a.realized.to_bits(), b.realized.to_bits());
            prop_assert_eq!(a.intercept.to_bits(), b.intercept.to_bits());
            prop_assert_eq!(a.slope.to_bits(), b.slope.to_bits());

            // Window bookkeeping holds on every run.
            for (i, s) in base.steps.iter().enumerate() {
                prop_assert_eq!(s.fit_n, 6 + i);
            }
        }

        #[test]
        fn backtests_are_deterministic(pairs in arb_rows()) {
            let start = month("2010-08");
            let rows: Vec<AlignedRow> = pairs
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| AlignedRow { target_month: start.offset(i as i32), y, x })
                .collect();
            prop_assume!(rows.iter().take(6).map(|r| r.x).any(|v| v != rows[0].x));
            let data = AlignedDataset {
                rows: rows.clone(),
                horizon: 1,
                target_label: "Y".into(),
                predictor_label: "X".into(),
            };
            let cfg = BacktestConfig {
                train_start: start,
                forecast_start: start.offset(6),
                forecast_end: start.offset(rows.len() as i32 - 1),
                horizon: 1,
            };
            let a = expanding_backtest(&data, &cfg).unwrap();
            let b = expanding_backtest(&data, &cfg).unwrap();
            prop_assert_eq!(a.to_csv(), b.to_csv());
        }
    }
}
