//! The four pipeline commands. Each one resolves its configuration, runs
//! core library stages, stages any file outputs, and commits them only on
//! success.

use std::io::IsTerminal;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use lexicast_core::backtest::{self, BacktestConfig};
use lexicast_core::emolex::{self, SentimentSeries};
use lexicast_core::olsreg::{self, report as olsreport};
use lexicast_core::tseries::{self, IndexTable};
use lexicast_core::{corpus, numfmt, Error, Month};

use crate::config::{CommonArgs, RunConfig, Window};
use crate::stage::Stage;

fn color_enabled<T: IsTerminal>(stream: &T) -> bool {
    std::env::var_os("NO_COLOR").is_none() && stream.is_terminal()
}

fn warn(msg: &str) {
    if color_enabled(&std::io::stderr()) {
        eprintln!("\x1b[33mwarning:\x1b[0m {msg}");
    } else {
        eprintln!("warning: {msg}");
    }
}

fn heading(text: &str) -> String {
    if color_enabled(&std::io::stdout()) {
        format!("\x1b[1m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn month_or(m: Option<Month>, open: &str) -> String {
    m.map_or_else(|| open.to_string(), |m| m.to_string())
}

/// Loads the corpus, applying the optional document window with a warning
/// for anything dropped.
fn load_corpus(cfg: &RunConfig) -> Result<corpus::MonthlyBuckets> {
    let manifest = cfg.corpus_manifest()?;
    let root = cfg.corpus_root()?;
    let entries = corpus::load_manifest(manifest)?;
    let (kept, dropped) = corpus::split_by_window(entries, cfg.corpus_start, cfg.corpus_end);
    if !dropped.is_empty() {
        warn(&format!(
            "dropping {} document(s) dated outside {}..{}",
            dropped.len(),
            month_or(cfg.corpus_start, "open"),
            month_or(cfg.corpus_end, "open"),
        ));
    }
    if kept.is_empty() {
        bail!("no documents remain after the corpus window filter");
    }
    let docs = corpus::read_documents(&kept, root)?;
    Ok(corpus::bucket_by_month(docs))
}

pub fn ingest(args: &CommonArgs) -> Result<()> {
    let cfg = RunConfig::from_args(args)?;
    let buckets = load_corpus(&cfg)?;
    let first = buckets.first_month().expect("nonempty buckets");
    let last = buckets.last_month().expect("nonempty buckets");
    println!(
        "{} document(s) across {} month(s), {first}..{last}",
        buckets.doc_count(),
        buckets.month_count(),
    );
    let gaps: Vec<String> = Month::range_inclusive(first, last)
        .filter(|&m| buckets.get(m).is_none())
        .map(|m| m.to_string())
        .collect();
    if gaps.is_empty() {
        println!("month coverage: no gaps");
    } else {
        warn(&format!(
            "no documents in {}; scoring cannot bridge missing months",
            gaps.join(", "),
        ));
    }
    Ok(())
}

pub fn score(args: &CommonArgs) -> Result<()> {
    let cfg = RunConfig::from_args(args)?;
    // Lexicons load first so a bad path fails before any corpus work.
    let excite = emolex::load_lexicon(cfg.lexicon_excite()?, "excitement")?;
    let anx = emolex::load_lexicon(cfg.lexicon_anx()?, "anxiety")?;
    let shared = excite.overlap(&anx);
    if !shared.is_empty() {
        warn(&format!(
            "{} term(s) appear in both lexicons and count for both: {}",
            shared.len(),
            shared.join(", "),
        ));
    }

    let buckets = load_corpus(&cfg)?;
    let counts = emolex::monthly_counts(&buckets, &excite, &anx);
    let broker = emolex::sentiment_from_counts(&counts, "BROKER")?;
    let diff = emolex::diff_series(&broker)?;

    let mut counts_csv = String::from("month,excitement,anxiety,chars\n");
    for (month, c) in &counts {
        counts_csv.push_str(&format!("{month},{},{},{}\n", c.excitement, c.anxiety, c.chars));
    }

    let stage = Stage::new(cfg.output_dir())?;
    stage.write("counts.csv", counts_csv)?;
    stage.write("broker.csv", broker.to_csv())?;
    stage.write("diffbroker.csv", diff.to_csv())?;
    for path in stage.commit()? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// The consensus benchmark is optional: it needs a consensus value for the
/// whole forecast window and is skipped with a warning otherwise.
fn consensus_over_window(table: &IndexTable, w: Window) -> Result<Option<SentimentSeries>> {
    match tseries::build_consensus_diff(table, Some((w.forecast_start, w.forecast_end))) {
        Ok(series) => Ok(Some(series)),
        Err(Error::MissingConsensus { month }) => {
            warn(&format!("no consensus value for {month}; benchmark comparison skipped"));
            Ok(None)
        }
        Err(err) => Err(err.into()),
    }
}

fn benchmark_fit(
    table: &IndexTable,
    consensus: &SentimentSeries,
    w: Window,
    horizon: u32,
) -> Result<String> {
    let target = tseries::build_target(table, horizon)?;
    let mut aligned = tseries::align(&target, consensus, 0)?;
    aligned.rows.retain(|r| r.target_month >= w.forecast_start && r.target_month <= w.forecast_end);
    let (x, y) = aligned.xy();
    let fit = olsreg::fit_ols(&x, &y)?;
    Ok(olsreport::format_fit(&fit, &aligned.target_label, &aligned.predictor_label))
}

pub fn backtest(args: &CommonArgs) -> Result<()> {
    let cfg = RunConfig::from_args(args)?;
    let w = cfg.window()?;
    let horizons = cfg.horizons()?;
    let out = cfg.output_dir();

    let predictor_path = out.join("diffbroker.csv");
    let diff = emolex::read_series_csv(&predictor_path, "DIFFBROKER")
        .context("backtest reads the diffbroker.csv written by `lexicast score`")?;
    let table = tseries::read_index_csv(cfg.index_table()?)?;

    let base = BacktestConfig {
        train_start: w.train_start,
        forecast_start: w.forecast_start,
        forecast_end: w.forecast_end,
        horizon: 1,
    };
    let results = backtest::horizon_study(&table, &diff, &base, &horizons)?;
    let consensus = consensus_over_window(&table, w)?;

    let stage = Stage::new(out)?;
    let mut summary = String::from("horizon,hits,steps,hit_rate\n");
    for (h, result) in &results {
        stage.write(format!("backtest_h{h}.csv"), result.to_csv())?;
        let (hits, steps) = backtest::sign_hit_rate(result)?;
        summary.push_str(&format!(
            "{h},{hits},{steps},{}\n",
            numfmt::sig(hits as f64 / steps as f64, 10),
        ));

        println!("{}", heading(&format!("== horizon {h} ==")));
        println!("sign hits: {hits}/{steps}");
        let fit = backtest::realized_on_predicted(result)?;
        print!("{}", olsreport::format_fit(&fit, "REALIZED", "PREDICTED"));
        let verdict = backtest::unbiasedness_verdict(&fit, 0.05)?;
        println!(
            "unbiasedness at alpha 0.05: intercept t = {:.2}, slope-1 t = {:.2} -> {}",
            verdict.t_intercept,
            verdict.t_slope_vs_one,
            if verdict.unbiased { "unbiased" } else { "rejected" },
        );
        if let Some(cons) = &consensus {
            println!("consensus benchmark over the same window:");
            print!("{}", benchmark_fit(&table, cons, w, *h)?);
        }
        println!();
    }
    stage.write("summary.csv", summary)?;

    let first_horizon = horizons[0];
    stage.write("figure.csv", backtest::figure_csv(&results[&first_horizon], consensus.as_ref()))?;

    for path in stage.commit()? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(clap::Args, Debug)]
pub struct ReportArgs {
    /// Target series CSV (month,value), e.g. a DIFFPRELIM export.
    #[arg(long, value_name = "FILE")]
    pub target: PathBuf,
    /// Predictor series CSV (month,value), e.g. a DIFFBROKER export.
    #[arg(long, value_name = "FILE")]
    pub predictor: PathBuf,
    /// Months the predictor is lagged; 0 pairs same-month values.
    #[arg(long, default_value_t = 1)]
    pub horizon: u32,
    /// Keep only target months from here on.
    #[arg(long, value_name = "YYYY-MM")]
    pub start: Option<Month>,
    /// Keep only target months up to here.
    #[arg(long, value_name = "YYYY-MM")]
    pub end: Option<Month>,
    #[arg(long, default_value = "DIFFPRELIM")]
    pub target_label: String,
    #[arg(long, default_value = "DIFFBROKER")]
    pub predictor_label: String,
}

pub fn report(args: &ReportArgs) -> Result<()> {
    let target = emolex::read_series_csv(&args.target, &args.target_label)?;
    let predictor = emolex::read_series_csv(&args.predictor, &args.predictor_label)?;
    let mut aligned = tseries::align(&target, &predictor, args.horizon)?;
    aligned.rows.retain(|r| {
        args.start.is_none_or(|s| r.target_month >= s)
            && args.end.is_none_or(|e| r.target_month <= e)
    });
    if aligned.rows.is_empty() {
        bail!(
            "no aligned observations in {}..{}",
            month_or(args.start, "open"),
            month_or(args.end, "open"),
        );
    }
    let (x, y) = aligned.xy();
    let fit = olsreg::fit_ols(&x, &y)?;
    print!("{}", olsreport::format_fit(&fit, &args.target_label, &args.predictor_label));
    // The diagnostics line needs the smallest sample the RESET check accepts.
    if fit.n >= 8 {
        let diag = olsreg::diagnostics(&fit, &x, &y)?;
        print!("{}", olsreport::format_diagnostics(&diag));
    }
    Ok(())
}
