//! Run configuration: an optional JSON file supplies defaults, command-line
//! flags override field by field, and each command demands only the fields
//! it actually uses.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lexicast_core::Month;
use serde::Deserialize;

#[derive(clap::Args, Debug, Default)]
pub struct CommonArgs {
    /// JSON file supplying defaults for any flag below.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// JSON-lines corpus manifest.
    #[arg(long, value_name = "FILE")]
    pub corpus_manifest: Option<PathBuf>,
    /// Directory that manifest document paths are relative to.
    #[arg(long, value_name = "DIR")]
    pub corpus_root: Option<PathBuf>,
    /// Excitement lexicon, one term per line.
    #[arg(long, value_name = "FILE")]
    pub lexicon_excite: Option<PathBuf>,
    /// Anxiety lexicon, one term per line.
    #[arg(long, value_name = "FILE")]
    pub lexicon_anx: Option<PathBuf>,
    /// Index table CSV (month,preliminary,final,consensus).
    #[arg(long, value_name = "FILE")]
    pub index_table: Option<PathBuf>,
    /// First month of the training window.
    #[arg(long, value_name = "YYYY-MM")]
    pub train_start: Option<Month>,
    /// First forecasted month.
    #[arg(long, value_name = "YYYY-MM")]
    pub forecast_start: Option<Month>,
    /// Last forecasted month.
    #[arg(long, value_name = "YYYY-MM")]
    pub forecast_end: Option<Month>,
    /// Forecast horizons in months.
    #[arg(long, value_delimiter = ',', value_name = "H,H,...")]
    pub horizons: Option<Vec<u32>>,
    /// Directory all outputs are written into.
    #[arg(long, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,
    /// Drop corpus documents dated before this month.
    #[arg(long, value_name = "YYYY-MM")]
    pub corpus_start: Option<Month>,
    /// Drop corpus documents dated after this month.
    #[arg(long, value_name = "YYYY-MM")]
    pub corpus_end: Option<Month>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    corpus_manifest: Option<PathBuf>,
    corpus_root: Option<PathBuf>,
    lexicon_excite: Option<PathBuf>,
    lexicon_anx: Option<PathBuf>,
    index_table: Option<PathBuf>,
    window: Option<FileWindow>,
    horizons: Option<Vec<u32>>,
    output_dir: Option<PathBuf>,
    corpus_start: Option<Month>,
    corpus_end: Option<Month>,
}

#[derive(Debug, Deserialize)]
struct FileWindow {
    train_start: Month,
    forecast_start: Month,
    forecast_end: Month,
}

/// The merged configuration. Fields stay optional here; accessors turn a
/// missing field into an error naming both the flag and the file key.
#[derive(Debug, Default)]
pub struct RunConfig {
    corpus_manifest: Option<PathBuf>,
    corpus_root: Option<PathBuf>,
    lexicon_excite: Option<PathBuf>,
    lexicon_anx: Option<PathBuf>,
    index_table: Option<PathBuf>,
    train_start: Option<Month>,
    forecast_start: Option<Month>,
    forecast_end: Option<Month>,
    horizons: Option<Vec<u32>>,
    output_dir: Option<PathBuf>,
    pub corpus_start: Option<Month>,
    pub corpus_end: Option<Month>,
}

#[derive(Clone, Copy, Debug)]
pub struct Window {
    pub train_start: Month,
    pub forecast_start: Month,
    pub forecast_end: Month,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<RunConfig> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let (file_train, file_fstart, file_fend) = match file.window {
            Some(w) => (Some(w.train_start), Some(w.forecast_start), Some(w.forecast_end)),
            None => (None, None, None),
        };
        Ok(RunConfig {
            corpus_manifest: args.corpus_manifest.clone().or(file.corpus_manifest),
            corpus_root: args.corpus_root.clone().or(file.corpus_root),
            lexicon_excite: args.lexicon_excite.clone().or(file.lexicon_excite),
            lexicon_anx: args.lexicon_anx.clone().or(file.lexicon_anx),
            index_table: args.index_table.clone().or(file.index_table),
            train_start: args.train_start.or(file_train),
            forecast_start: args.forecast_start.or(file_fstart),
            forecast_end: args.forecast_end.or(file_fend),
            horizons: args.horizons.clone().or(file.horizons),
            output_dir: args.output_dir.clone().or(file.output_dir),
            corpus_start: args.corpus_start.or(file.corpus_start),
            corpus_end: args.corpus_end.or(file.corpus_end),
        })
    }

    pub fn corpus_manifest(&self) -> Result<&Path> {
        require(&self.corpus_manifest, "corpus-manifest").map(PathBuf::as_path)
    }

    pub fn corpus_root(&self) -> Result<&Path> {
        require(&self.corpus_root, "corpus-root").map(PathBuf::as_path)
    }

    pub fn lexicon_excite(&self) -> Result<&Path> {
        require(&self.lexicon_excite, "lexicon-excite").map(PathBuf::as_path)
    }

    pub fn lexicon_anx(&self) -> Result<&Path> {
        require(&self.lexicon_anx, "lexicon-anx").map(PathBuf::as_path)
    }

    pub fn index_table(&self) -> Result<&Path> {
        require(&self.index_table, "index-table").map(PathBuf::as_path)
    }

    pub fn window(&self) -> Result<Window> {
        Ok(Window {
            train_start: *require(&self.train_start, "train-start")?,
            forecast_start: *require(&self.forecast_start, "forecast-start")?,
            forecast_end: *require(&self.forecast_end, "forecast-end")?,
        })
    }

    /// Horizons default to the one-month-ahead study.
    pub fn horizons(&self) -> Result<Vec<u32>> {
        let hs = self.horizons.clone().unwrap_or_else(|| vec![1]);
        if hs.is_empty() {
            bail!("--horizons must list at least one horizon");
        }
        if let Some(&h) = hs.iter().find(|&&h| h == 0) {
            bail!("horizon {h} invalid; horizons are whole months >= 1");
        }
        Ok(hs)
    }

    pub fn output_dir(&self) -> &Path {
        self.output_dir.as_deref().unwrap_or(Path::new("out"))
    }
}

fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T> {
    value.as_ref().with_context(|| {
        let key = flag.replace('-', "_");
        format!("missing --{flag} (or \"{key}\" in --config file)")
    })
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let raw = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&raw).with_context(|| format!("invalid config {}", path.display()))
}
