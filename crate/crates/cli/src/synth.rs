//! Synthetic corpus and index generator. A latent monthly sentiment path
//! drives planted lexicon-word frequencies in generated documents; the
//! index table's preliminary releases then move with the lagged change in
//! the corpus's own scored sentiment, scaled by `signal_strength`, plus
//! Gaussian noise of sd `noise_sd`. Everything is a pure function of the
//! [`SynthSpec`], so a fixed seed reproduces identical bytes.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use lexicast_core::tseries::{IndexRecord, IndexTable};
use lexicast_core::{corpus, emolex, Month};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::stage::Stage;

/// The demo lexicons ship inside the binary so generated bundles are
/// self-contained; the same files back the bundled demo corpus.
const EXCITE_LEXICON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/lexicons/excitement.txt"));
const ANX_LEXICON: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/lexicons/anxiety.txt"));

/// Neutral desk-note sentences; none of them contain a lexicon term.
const FILLER: [&str; 12] = [
    "Flows across the desk book were orderly through the session.",
    "Client activity stayed close to seasonal norms.",
    "Positioning in the front end was little changed on the week.",
    "Auction takedown matched the runs seen last quarter.",
    "Desk inventories were managed flat into the close.",
    "Turnover thinned ahead of the data calendar.",
    "Spreads held inside recent ranges for most of the day.",
    "The morning call centered on supply for the coming month.",
    "Overnight sessions passed with modest two-way interest.",
    "Balance sheets rolled over without incident at quarter end.",
    "Macro releases landed broadly in line with published medians.",
    "The afternoon tape was quiet into the settlement window.",
];

const START_MONTH: &str = "2010-06";

#[derive(clap::Args, Debug)]
pub struct SynthArgs {
    /// Number of consecutive corpus months starting 2010-06.
    #[arg(long, default_value_t = 38)]
    pub months: u32,
    /// Documents generated per month.
    #[arg(long, default_value_t = 8)]
    pub docs_per_month: u32,
    /// Scale tying preliminary-index changes to the lagged sentiment change.
    #[arg(long, default_value_t = 120.0)]
    pub signal_strength: f64,
    /// Standard deviation of the noise added to preliminary releases.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
    /// RNG seed; fixed seed means byte-identical outputs.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Directory the bundle is written into.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct SynthSpec {
    pub months: u32,
    pub docs_per_month: u32,
    pub signal_strength: f64,
    pub noise_sd: f64,
    pub seed: u64,
    pub start_month: Month,
}

impl SynthSpec {
    pub fn from_args(args: &SynthArgs) -> Result<SynthSpec> {
        let spec = SynthSpec {
            months: args.months,
            docs_per_month: args.docs_per_month,
            signal_strength: args.signal_strength,
            noise_sd: args.noise_sd,
            seed: args.seed,
            start_month: START_MONTH.parse().expect("constant month"),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.months < 6 {
            bail!("--months {} too small; need at least 6", self.months);
        }
        if i32::try_from(self.months).is_err() {
            bail!("--months {} out of range", self.months);
        }
        if self.docs_per_month < 1 {
            bail!("--docs-per-month must be at least 1");
        }
        if !(self.signal_strength >= 0.0 && self.signal_strength.is_finite()) {
            bail!("--signal-strength must be finite and >= 0");
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            bail!("--noise-sd must be finite and >= 0");
        }
        Ok(())
    }
}

pub fn run(args: &SynthArgs) -> Result<()> {
    let spec = SynthSpec::from_args(args)?;
    let stage = Stage::new(&args.output_dir)?;
    generate(&spec, &stage)?;
    for path in stage.commit()? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Ordered term list from an embedded lexicon file; order matters for
/// deterministic planting.
fn term_list(raw: &str) -> Vec<&str> {
    raw.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

pub fn generate(spec: &SynthSpec, stage: &Stage) -> Result<()> {
    let excite_terms = term_list(EXCITE_LEXICON);
    let anx_terms = term_list(ANX_LEXICON);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let start = spec.start_month;
    let months = spec.months as i32;

    // Latent sentiment: a seasonal swing plus a persistent AR(1) component.
    let mut latent = Vec::with_capacity(spec.months as usize);
    let mut ar = 0.0_f64;
    for m in 0..months {
        let shock: f64 = rng.sample(StandardNormal);
        ar = 0.7 * ar + 0.9 * shock;
        latent.push(3.0 * (std::f64::consts::TAU * m as f64 / 18.0).sin() + ar);
    }

    let mut manifest = String::new();
    for m in 0..months {
        let month = start.offset(m);
        for k in 0..spec.docs_per_month {
            let net_base = (2.5 * latent[m as usize]).round() as i64;
            let net = (net_base + rng.gen_range(-2..=2)).clamp(-12, 12);
            let excite_n = (14 + net + rng.gen_range(0..=2)) as usize;
            let anx_n = (14 - net + rng.gen_range(0..=2)) as usize;
            let id = format!("{month}-d{k:02}");

            let mut text = format!("Desk note {id}.\n");
            for _ in 0..rng.gen_range(4..=9) {
                text.push_str(FILLER[rng.gen_range(0..FILLER.len())]);
                text.push(' ');
            }
            text.push_str("\nTone tags:");
            for i in 0..excite_n {
                write!(text, " {}", excite_terms[i % excite_terms.len()]).unwrap();
            }
            for i in 0..anx_n {
                write!(text, " {}", anx_terms[i % anx_terms.len()]).unwrap();
            }
            text.push_str(".\n");

            let day = 2 + (k * 3) % 26;
            stage.write(format!("corpus/docs/{id}.txt"), &text)?;
            manifest.push_str(&format!(
                "{{\"id\":\"{id}\",\"source\":\"desk-{}\",\"date\":\"{month}-{day:02}\",\"path\":\"docs/{id}.txt\"}}\n",
                1 + k % 3,
            ));
        }
    }
    stage.write("corpus/manifest.jsonl", &manifest)?;
    stage.write("lexicons/excitement.txt", EXCITE_LEXICON)?;
    stage.write("lexicons/anxiety.txt", ANX_LEXICON)?;

    // Score the corpus exactly as a downstream run would, reading back the
    // staged files, so the planted index linkage matches what scoring sees.
    let entries = corpus::load_manifest(&stage.staged_path("corpus/manifest.jsonl"))?;
    let docs = corpus::read_documents(&entries, &stage.staged_path("corpus"))?;
    let buckets = corpus::bucket_by_month(docs);
    let excite = emolex::load_lexicon(&stage.staged_path("lexicons/excitement.txt"), "excitement")?;
    let anx = emolex::load_lexicon(&stage.staged_path("lexicons/anxiety.txt"), "anxiety")?;
    let broker = emolex::monthly_sentiment(&buckets, &excite, &anx)
        .context("scoring the generated corpus")?;
    let diff = emolex::diff_series(&broker)?;

    // Final prints random-walk; preliminary moves off the prior final by
    // the scaled lagged sentiment change plus noise.
    let mut finals = Vec::with_capacity(spec.months as usize);
    let mut level = 80.0_f64;
    for _ in 0..months {
        finals.push(level);
        let step: f64 = rng.sample(StandardNormal);
        level += 0.6 * step;
    }
    // Consensus poll error draws from its own stream so the preliminary
    // path for a seed is independent of it.
    let mut poll_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut rows: Vec<(Month, IndexRecord)> = Vec::with_capacity(spec.months as usize);
    for m in 0..months {
        let month = start.offset(m);
        let noise = if spec.noise_sd > 0.0 {
            spec.noise_sd * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        let preliminary = match diff.get(month.offset(-1)) {
            Some(d) if m >= 2 => finals[m as usize - 1] + spec.signal_strength * d + noise,
            _ if m >= 1 => finals[m as usize - 1] + 0.2 + noise,
            _ => 80.0,
        };
        let consensus = (m >= 1).then(|| {
            let prior = finals[m as usize - 1];
            prior + 0.35 * (preliminary - prior) + 0.8 * poll_rng.sample::<f64, _>(StandardNormal)
        });
        rows.push((month, IndexRecord { preliminary, final_value: finals[m as usize], consensus }));
    }
    let table = IndexTable::from_rows(rows).context("assembling the synthetic index")?;
    stage.write("index.csv", table.to_csv())?;

    let provenance =
        serde_json::to_string_pretty(spec).context("serializing provenance")? + "\n";
    stage.write("provenance.json", provenance)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_lexicons_have_terms_and_no_overlap() {
        let excite = term_list(EXCITE_LEXICON);
        let anx = term_list(ANX_LEXICON);
        assert!(excite.len() >= 10);
        assert!(anx.len() >= 10);
        assert!(excite.iter().all(|t| !anx.contains(t)));
    }

    #[test]
    fn filler_avoids_every_lexicon_term() {
        let excite = term_list(EXCITE_LEXICON);
        let anx = term_list(ANX_LEXICON);
        for sentence in FILLER {
            for token in emolex::tokenize(sentence) {
                assert!(!excite.contains(&token.as_str()), "{token} in {sentence:?}");
                assert!(!anx.contains(&token.as_str()), "{token} in {sentence:?}");
            }
        }
    }

    #[test]
    fn spec_bounds_are_enforced() {
        let base = SynthArgs {
            months: 38,
            docs_per_month: 8,
            signal_strength: 120.0,
            noise_sd: 0.0,
            seed: 7,
            output_dir: PathBuf::from("out"),
        };
        assert!(SynthSpec::from_args(&base).is_ok());
        assert!(SynthSpec::from_args(&SynthArgs { months: 5, ..base_clone(&base) }).is_err());
        assert!(
            SynthSpec::from_args(&SynthArgs { docs_per_month: 0, ..base_clone(&base) }).is_err()
        );
        assert!(
            SynthSpec::from_args(&SynthArgs { signal_strength: -1.0, ..base_clone(&base) })
                .is_err()
        );
        assert!(
            SynthSpec::from_args(&SynthArgs { noise_sd: f64::NAN, ..base_clone(&base) }).is_err()
        );
    }

    fn base_clone(a: &SynthArgs) -> SynthArgs {
        SynthArgs {
            months: a.months,
            docs_per_month: a.docs_per_month,
            signal_strength: a.signal_strength,
            noise_sd: a.noise_sd,
            seed: a.seed,
            output_dir: a.output_dir.clone(),
        }
    }

    #[test]
    fn generated_bundle_is_internally_consistent() {
        let dir = tempfile::tempdir().unwrap();
        let spec = SynthSpec {
            months: 12,
            docs_per_month: 3,
            signal_strength: 120.0,
            noise_sd: 0.0,
            seed: 11,
            start_month: START_MONTH.parse().unwrap(),
        };
        let stage = Stage::new(dir.path()).unwrap();
        generate(&spec, &stage).unwrap();
        stage.commit().unwrap();

        let entries = corpus::load_manifest(&dir.path().join("corpus/manifest.jsonl")).unwrap();
        assert_eq!(entries.len(), 36);
        let docs = corpus::read_documents(&entries, &dir.path().join("corpus")).unwrap();
        let buckets = corpus::bucket_by_month(docs);
        assert_eq!(buckets.month_count(), 12);

        let table =
            lexicast_core::tseries::read_index_csv(&dir.path().join("index.csv")).unwrap();
        assert_eq!(table.len(), 12);

        // Noiseless linkage: preliminary change equals the scaled lagged
        // sentiment change, up to the CSV's 10-significant-digit rounding.
        let excite =
            emolex::load_lexicon(&dir.path().join("lexicons/excitement.txt"), "excitement")
                .unwrap();
        let anx = emolex::load_lexicon(&dir.path().join("lexicons/anxiety.txt"), "anxiety")
            .unwrap();
        let broker = emolex::monthly_sentiment(&buckets, &excite, &anx).unwrap();
        let diff = emolex::diff_series(&broker).unwrap();
        for (month, rec) in table.iter().skip(2) {
            let lagged = diff.get(month.offset(-1)).unwrap();
            let prior = table.get(month.offset(-1)).unwrap().final_value;
            assert!(
                (rec.preliminary - prior - 120.0 * lagged).abs() < 1e-6,
                "month {month}"
            );
        }
    }
}
